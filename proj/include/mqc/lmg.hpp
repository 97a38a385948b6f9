#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mqc/core.hpp"

namespace mqc::lmg {

/// H = -(chi/N) S_z^2 - omega S_x in the Dicke z-basis (tridiagonal, real symmetric).
struct LmgHamiltonian {
    int n_spins = 0;
    double chi = 1.0;
    double omega = 0.0;
    std::vector<double> diagonal;      // length N+1, ascending m_z
    std::vector<double> off_diagonal;  // length N, <m+1|H|m>

    Eigen::MatrixXd dense() const;
    SpinBasis basis() const { return SpinBasis::dicke(n_spins); }
};

LmgHamiltonian build_lmg(const ModelSpec& spec);

/// Ground state, from the sector even under m_z -> -m_z (the sector holding the
/// ground state for omega > 0 and the GHZ+ combination at omega = 0). Phase fixed
/// so the largest-magnitude amplitude is real positive.
StateVector lmg_ground_state(const LmgHamiltonian& h);

/// Lowest `count` eigenvalues in the flip-even sector, ascending.
std::vector<double> lmg_even_sector_levels(const LmgHamiltonian& h, int count);

/// Eigendecomposition of S_x in the Dicke z-basis. Eigenvalues ascend from -N/2.
class SxEigenbasis {
public:
    explicit SxEigenbasis(int n_spins);

    int n_spins() const noexcept { return n_spins_; }
    const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }
    const Eigen::MatrixXd& eigenvectors() const noexcept { return vectors_; }

    /// Coefficients <m_x|psi> ordered by ascending m_x.
    Eigen::VectorXcd to_x_basis(const Eigen::VectorXcd& z_amplitudes) const;
    Eigen::VectorXcd from_x_basis(const Eigen::VectorXcd& x_amplitudes) const;
    /// exp(-i phi S_x) applied exactly.
    Eigen::VectorXcd rotate(const Eigen::VectorXcd& z_amplitudes, double phi) const;
    /// Applies exp(-i phi_j S_x) to column j of a batch.
    Eigen::MatrixXcd rotate_columns(const Eigen::VectorXcd& z_amplitudes, const std::vector<double>& phis) const;
    /// |N/2, m_x = N/2>, the fully x-polarized state.
    StateVector polarized_x() const;

    /// Shared, lazily built instance per N.
    static std::shared_ptr<const SxEigenbasis> cached(int n_spins);

private:
    int n_spins_;
    Eigen::VectorXd values_;
    Eigen::MatrixXd vectors_;
};

/// True MQC spectrum w.r.t. S_x of a Dicke state: I_m = sum_n P_n P_{n+m}.
MqcSpectrum mqc_of_state(const StateVector& state);
/// F_phi = |<psi| exp(-i phi S_x) |psi>|^2.
double fotoc_of_state(const StateVector& state, double phi);

/// Squeezing parameter of the Holstein-Primakoff paramagnet, tanh(2r) = chi / (2 omega - chi).
struct SqueezeParameter {
    double r = 0.0;
    static SqueezeParameter from_field_ratio(double omega_over_chi);
};

/// Large-N paramagnetic intensity I_m for even m (odd m gives 0).
/// Normalized by sech^2(r) so the spectrum sums to one.
double hp_intensity(int m, double omega_over_chi);

/// Leading behaviour of hp_intensity as omega/chi -> 1+:
/// (2/pi) sqrt(eps) [-2 H_{(m-1)/2} - 2 ln 2 - ln eps], eps = omega/chi - 1.
double hp_intensity_near_critical(int m, double omega_over_chi);

/// Leading behaviour of d^2 I_m / d(omega/chi)^2 as omega/chi -> 1+:
/// [ln 4 + 2 H_{(m-1)/2} + ln eps] / (2 pi eps^{3/2}).
double hp_second_derivative_asymptote(int m, double omega_over_chi);

/// Intensities of (|N/2>_z + |-N/2>_z)/sqrt(2):
/// (2/4^N) C(2N, N-m) + (-1)^{m/2} (2/4^N) C(N, (N-m)/2) for even m, 0 otherwise.
double ghz_intensity(int n_spins, int m);

}  // namespace mqc::lmg
