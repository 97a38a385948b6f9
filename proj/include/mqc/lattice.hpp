#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mqc/core.hpp"

namespace mqc::lattice {

/// Gaussian longitudinal fields delta_i ~ N(0, sigma^2).
///
/// Generator: std::mt19937_64 seeded with `seed`; uniforms take the top 53 bits
/// of each draw, normals come from the Box-Muller transform using both outputs.
/// The sequence is fixed by the C++ standard so fields are bit-reproducible.
struct DisorderRealization {
    std::uint64_t seed = 0;
    double sigma = 0.0;
    std::vector<double> fields;
};

DisorderRealization draw_disorder(std::uint64_t seed, double sigma, int n_spins);

/// Seed of realization r derived from a base seed (SplitMix64 finalizer of base + r).
std::uint64_t realization_seed(std::uint64_t base_seed, std::uint64_t index);

/// Matrix-free spin-chain Hamiltonian on the 2^N bitstring basis:
/// diagonal (zz couplings and longitudinal fields) plus -(omega/2) sum sigma^x.
class SparseSpinHamiltonian {
public:
    explicit SparseSpinHamiltonian(const ModelSpec& spec, int bitstring_cap = kDefaultBitstringCap);

    const ModelSpec& spec() const noexcept { return spec_; }
    int n_spins() const noexcept { return spec_.n_spins; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(diagonal_->size()); }
    const Eigen::VectorXd& diagonal() const noexcept { return *diagonal_; }
    double transverse_amplitude() const noexcept { return spec_.omega; }
    SpinBasis basis() const { return SpinBasis::bitstring(spec_.n_spins); }

    /// out = H in. Same overloads for real and complex vectors.
    void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
    void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

    /// Same operator with a different transverse field; shares the diagonal.
    SparseSpinHamiltonian with_omega(double omega) const;

    /// Dense matrix for small checks (N <= 14).
    Eigen::MatrixXd dense() const;

private:
    ModelSpec spec_;
    std::shared_ptr<const Eigen::VectorXd> diagonal_;
};

/// Translation- and flip-symmetric subspace: uniform superpositions over orbits of
/// bitstrings under cyclic shifts and the global spin flip (zero momentum, flip-even).
/// Holds the ground state of periodic TFI/ANNNI chains with even N.
class SymmetricSector {
public:
    /// Orbit structure for N spins, cached per N.
    static std::shared_ptr<const SymmetricSector> cached(int n_spins);
    explicit SymmetricSector(int n_spins);

    int n_spins() const noexcept { return n_spins_; }
    std::size_t dimension() const noexcept { return representatives_.size(); }

    /// Diagonal of H restricted to the sector.
    Eigen::VectorXd restrict_diagonal(const Eigen::VectorXd& full_diagonal) const;
    /// out = H in on sector coefficients for H = diag - (omega/2) sum sigma^x.
    void apply(const Eigen::VectorXd& sector_diagonal, double omega, const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
    /// Full 2^N amplitudes of a sector vector and the projection back.
    Eigen::VectorXd expand(const Eigen::VectorXd& coeffs) const;
    Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;

private:
    int n_spins_;
    std::vector<std::uint32_t> representatives_;
    std::vector<double> orbit_size_;
    std::vector<std::uint32_t> orbit_of_;  // bitstring -> sector index
};

/// True for translation-invariant chains (no longitudinal disorder) that also have the flip symmetry.
bool has_symmetric_sector(const ModelSpec& spec);

/// H |v> (unnormalized, so returned as raw amplitudes).
Eigen::VectorXcd apply_hamiltonian(const SparseSpinHamiltonian& h, const StateVector& v);

/// prod_i exp(-i phi sigma^x_i / 2) = exp(-i phi S_x), applied site by site.
StateVector apply_global_x_rotation(const StateVector& v, double phi);
Eigen::VectorXcd rotate_x(const Eigen::VectorXcd& amplitudes, int n_spins, double phi);

/// |<v| exp(-i phi S_x) |v>|^2.
double fotoc_of_state(const StateVector& v, double phi);

/// Probabilities of the S_x eigenvalues N/2 - n, n = 0..N (Walsh-Hadamard transform).
std::vector<double> sx_distribution(const StateVector& v);

/// True MQC spectrum w.r.t. S_x: I_m = sum_n P_n P_{n+m}.
MqcSpectrum mqc_of_state(const StateVector& v);

struct OrderParameter {
    double raw = 0.0;         // <|S_z|>
    double normalized = 0.0;  // 2 <|S_z|> / N
};

OrderParameter order_parameter_abs_sz(const StateVector& v);

/// Bytes needed to hold `vectors` complex vectors of length 2^N.
std::uint64_t state_bytes(int n_spins, int vectors = 1);

}  // namespace mqc::lattice
