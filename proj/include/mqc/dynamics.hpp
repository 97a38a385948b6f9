#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mqc/core.hpp"
#include "mqc/krylov.hpp"

namespace mqc::dynamics {

/// Transverse-field ramp on n midpoint steps. times/omegas hold the n + 1 grid
/// points t_j = j tau / n; step j (1-based) uses H(Omega((j - 1/2) tau / n)).
struct RampSchedule {
    std::vector<double> times;
    std::vector<double> omegas;
    std::vector<double> midpoint_omegas;  // length n
    double tau = 0.0;
    int steps = 0;

    double dt() const { return tau / steps; }
};

/// n = max(1000, ceil(40 chi tau)).
int default_steps(double chi_tau);

RampSchedule build_linear_schedule(double omega0, double omega_tau, double tau, int steps);

/// Local adiabatic schedule dOmega/dt = -Delta(Omega)^2 / gamma, with gamma fixed
/// by the total duration. t(Omega) is tabulated on 400 log-spaced points and
/// inverted with monotone cubic (PCHIP) interpolation.
RampSchedule build_laa_schedule(double omega0, double omega_tau, double tau,
                                const std::function<double(double)>& gap, int steps);

/// Gap to the first excitation the ramp can reach:
///  LMG: second minus first level of the flip-even Dicke sector;
///  TFI: chi * eps_{pi/N}(g), the lowest even-parity two-fermion excitation;
///  ANNNI: Lanczos, flip-even sector; RFTI: Lanczos, full space.
double instantaneous_gap(const ModelSpec& spec);

/// Time evolution for one model family at variable transverse field.
class Evolver {
public:
    virtual ~Evolver() = default;
    virtual SpinBasis basis() const = 0;
    virtual StateVector ground_state(double omega) const = 0;
    /// v <- exp(-i sign H(omega) dt) v.
    virtual void step(Eigen::VectorXcd& v, double omega, double dt, int sign) const = 0;
    /// Same step on every column.
    virtual void step_columns(Eigen::MatrixXcd& columns, double omega, double dt, int sign) const;
    /// exp(-i phi S_x) applied exactly.
    virtual Eigen::VectorXcd rotate(const Eigen::VectorXcd& v, double phi) const = 0;
};

/// LMG: exact propagator per step from the tridiagonal eigendecomposition.
/// Lattice models: Krylov propagation with the given options.
std::unique_ptr<Evolver> make_evolver(const ModelSpec& spec, const KrylovOptions& krylov = {});

StateVector propagate_step(const StateVector& v, const Evolver& evolver, double omega, double dt, int sign);

enum class Direction { Forward, Reverse };

/// Sequential midpoint steps; Reverse walks the schedule from its last step back to its first.
StateVector run_ramp(const StateVector& v0, const Evolver& evolver, const RampSchedule& schedule, int sign,
                     Direction direction = Direction::Forward);
StateVector run_ramp(const StateVector& v0, const ModelSpec& spec, const RampSchedule& schedule, int sign,
                     Direction direction = Direction::Forward);

enum class EchoKind { Ideal, Pseudo };

struct EchoResult {
    double phi = 0.0;
    double overlap = 0.0;  // |<psi_0| U_back R_phi U |psi_0>|^2
    EchoKind kind = EchoKind::Ideal;
    double return_fidelity = 0.0;
};

/// Forward ramp, rotation, then the backward leg (Ideal: sign -1, Pseudo: sign +1,
/// both over the reversed schedule). Initial state: ground state at Omega(0).
EchoResult run_ideal_echo(const ModelSpec& spec, const RampSchedule& schedule, double phi);
EchoResult run_pseudo_echo(const ModelSpec& spec, const RampSchedule& schedule, double phi);

struct EchoSeries {
    EchoKind kind = EchoKind::Ideal;
    std::vector<EchoResult> points;  // on the uniform grid 2 pi j / K
    FotocCurve curve;
    MqcSpectrum spectrum{0, {Complex(1.0)}, SpectrumKind::TrueEcho};  // I_m (Ideal) or I~_m (Pseudo)
    double return_fidelity = 0.0;
};

/// Echo overlaps over K uniform angles (K = 2N + 2 by default) sharing one
/// cached forward state, Fourier transformed to intensities.
EchoSeries run_echo_series(const Evolver& evolver, const StateVector& initial, const StateVector& ramped,
                           const RampSchedule& schedule, EchoKind kind, int phi_points = 0);

/// Everything a ramp study needs from one forward run.
struct RampStudy {
    StateVector initial;
    StateVector ramped;
    StateVector target;  // ground state at Omega(tau)
    double fidelity = 0.0;
    EchoSeries ideal;
    EchoSeries pseudo;
};

RampStudy run_ramp_study(const ModelSpec& spec, const RampSchedule& schedule, bool with_echoes = true,
                         int phi_points = 0);

struct CurvatureBound {
    double lhs = 0.0;  // sum m^2 |I_m|
    double rhs = 0.0;  // sum m^2 |I~_m|
    double qfi_lower_bound = 0.0;  // 2 sum m^2 |I~_m|
    bool ok = false;
};

/// ok when lhs >= rhs up to a 1e-9 relative slack.
CurvatureBound curvature_bound_check(const MqcSpectrum& intensities, const MqcSpectrum& effective);

}  // namespace mqc::dynamics
