#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mqc {

using Complex = std::complex<double>;

/// Central numeric tolerances shared by every module.
namespace tol {
inline constexpr double kStateNorm = 1e-10;   // normalization after construction/propagation
inline constexpr double kStateCheck = 1e-8;   // state-level equality checks
inline constexpr double kUnitarity = 1e-10;   // propagator norm preservation
inline constexpr double kSpectrum = 1e-9;     // reality/symmetry/positivity of true intensities
inline constexpr double kSpectrumSum = 1e-8;  // sum rule of a spectrum
inline constexpr double kFotocRange = 1e-12;  // slack on F in [0, 1]
}  // namespace tol

/// Raised when an iterative solver stops without reaching its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

enum class BasisKind { DickeZ, Bitstring };

/// Basis conventions:
///  - DickeZ: index i carries m_z = i - N/2, ascending from -N/2 to N/2.
///  - Bitstring: bit i of the index is site i (site 0 least significant);
///    a set bit means sigma^z = +1.
struct SpinBasis {
    BasisKind kind = BasisKind::DickeZ;
    int n_spins = 0;

    static SpinBasis dicke(int n_spins);
    static SpinBasis bitstring(int n_spins);

    std::size_t dimension() const;
    /// m_z label of a Dicke index.
    double dicke_mz(std::size_t index) const;

    friend bool operator==(const SpinBasis&, const SpinBasis&) = default;
};

std::string to_string(const SpinBasis& basis);

/// Normalized pure state over a labelled basis. Immutable after construction.
class StateVector {
public:
    /// Takes amplitudes that must already be normalized to within tol::kStateNorm.
    StateVector(SpinBasis basis, Eigen::VectorXcd amplitudes);

    /// Normalizes the given amplitudes; throws on a zero vector.
    static StateVector normalized(SpinBasis basis, Eigen::VectorXcd amplitudes);
    static StateVector basis_state(SpinBasis basis, std::size_t index);

    const SpinBasis& basis() const noexcept { return basis_; }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
    Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

    /// Multiplies by a global phase so the largest-magnitude amplitude is real positive.
    StateVector phase_fixed() const;
    /// Largest |Im| over amplitudes.
    double max_imag() const;

private:
    SpinBasis basis_;
    Eigen::VectorXcd amplitudes_;
};

/// <a|b>, conjugate-linear in the first argument.
Complex inner_product(const StateVector& a, const StateVector& b);
/// |<a|b>|^2.
double overlap_fidelity(const StateVector& a, const StateVector& b);

enum class ModelKind { LMG, TFI, ANNNI, RFTI };
enum class Boundary { Periodic };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Default cap on spin count for 2^N bitstring models.
inline constexpr int kDefaultBitstringCap = 24;

/// Declarative Hamiltonian description.
///
/// Lattice models use  H = -(chi/2) sum s_i s_{i+1} - (gamma/2) sum s_i s_{i+2}
///                         - sum delta_i s_i - (omega/2) sum sigma^x_i
/// with periodic wrap; LMG uses H = -(chi/N) S_z^2 - omega S_x.
struct ModelSpec {
    ModelKind model = ModelKind::TFI;
    int n_spins = 2;
    double chi = 1.0;
    double omega = 1.0;
    double gamma = 0.0;
    double disorder_sigma = 0.0;
    std::vector<double> disorder_fields;
    Boundary boundary = Boundary::Periodic;

    bool is_bitstring() const { return model != ModelKind::LMG; }
    /// gamma if ANNNI, else 0.
    double effective_gamma() const { return model == ModelKind::ANNNI ? gamma : 0.0; }
    /// Disorder fields if RFTI (zero-filled when absent), else all zero.
    std::vector<double> effective_fields() const;
    /// True when the Hamiltonian commutes with the global spin flip prod_i sigma^x_i.
    bool has_flip_symmetry() const;

    ModelSpec with_omega(double new_omega) const;

    /// Throws std::invalid_argument on N < 2, N above the bitstring cap,
    /// or a disorder-field array of the wrong length.
    void validate(int bitstring_cap = kDefaultBitstringCap) const;
};

enum class SpectrumKind { TrueEcho, PseudoEcho, Analytic };
std::string to_string(SpectrumKind kind);

/// Coherence-order intensities for m in [-m_max, m_max].
class MqcSpectrum {
public:
    MqcSpectrum(int m_max, std::vector<Complex> intensities, SpectrumKind kind);

    int m_max() const noexcept { return m_max_; }
    SpectrumKind kind() const noexcept { return kind_; }
    std::vector<int> orders() const;
    const std::vector<Complex>& intensities() const noexcept { return intensities_; }

    /// Intensity at order m; zero outside [-m_max, m_max].
    Complex at(int m) const;
    /// Real part at m (the physical value for true/analytic spectra).
    double real_at(int m) const { return at(m).real(); }
    Complex sum() const;

    /// Checks reality, nonnegativity and m <-> -m symmetry (true/analytic kinds)
    /// plus the sum rule against expected_sum. Returns a description of the first
    /// violation, or nullopt.
    std::optional<std::string> check_invariants(double expected_sum = 1.0) const;

private:
    int m_max_;
    std::vector<Complex> intensities_;
    SpectrumKind kind_;
};

/// Sampled fidelity out-of-time-order correlator.
struct FotocCurve {
    std::vector<double> phis;
    std::vector<double> values;

    /// Values within [0, 1] up to tol::kFotocRange.
    bool in_range() const;
};

/// K equally spaced angles 2 pi j / K, j = 0..K-1.
std::vector<double> uniform_phi_grid(int points);

/// Default grid size for coherence orders up to N: K = 2N + 2.
inline int default_phi_points(int n_spins) { return 2 * n_spins + 2; }

}  // namespace mqc
