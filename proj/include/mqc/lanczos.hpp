#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mqc/core.hpp"
#include "mqc/lattice.hpp"

namespace mqc {

enum class SectorFilter {
    Auto,       // Symmetric for periodic clean chains, FlipEven when only the flip symmetry holds, else None
    Symmetric,  // zero momentum and flip-even, solved in the reduced orbit basis
    FlipEven,   // full space, symmetrized under the global flip (caller asserts the symmetry)
    None,
};

/// Sector Auto resolves to for this Hamiltonian.
SectorFilter resolve_sector(const lattice::SparseSpinHamiltonian& h, SectorFilter requested);

struct LanczosOptions {
    int max_iter = 5000;       // total Hamiltonian applications
    double tol = 1e-10;        // on ||H psi - E psi||
    int basis_size = 120;      // stored vectors per restart cycle (full reorthogonalization)
    SectorFilter sector = SectorFilter::Auto;
    std::uint64_t seed = 0x5eed;
    std::optional<Eigen::VectorXd> start;  // warm start in the full 2^N space; random if empty
    std::vector<Eigen::VectorXd> deflate;  // orthonormal full-space vectors to project out
};

struct LanczosResult {
    double energy = 0.0;
    Eigen::VectorXd vector;  // full 2^N amplitudes, normalized, largest-magnitude entry positive
    double residual = 0.0;
    int iterations = 0;

    StateVector state(const SpinBasis& basis) const;
};

/// Lowest eigenpair by explicitly restarted Lanczos with full reorthogonalization.
/// Throws ConvergenceError (carrying the best residual) after max_iter applications.
LanczosResult lanczos_lowest(const lattice::SparseSpinHamiltonian& h, const LanczosOptions& options = {});

struct GroundState {
    double energy = 0.0;
    StateVector state;
    double residual = 0.0;
};

GroundState lanczos_ground_state(const lattice::SparseSpinHamiltonian& h, int max_iter = 5000, double tol = 1e-10);

/// Generic core on any real symmetric operator of dimension dim. project is applied
/// to every Krylov vector (may be empty); scale bounds ||H|| for breakdown tests.
LanczosResult lanczos_lowest(Eigen::Index dim, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
                             const std::function<void(Eigen::VectorXd&)>& project, double scale,
                             const LanczosOptions& options);

/// E1 - E0 within the sector selected by options.sector (ground state deflated).
double lanczos_gap(const lattice::SparseSpinHamiltonian& h, const LanczosOptions& options = {});

/// Largest number of stored Lanczos vectors that fits a memory budget in bytes.
int lanczos_basis_for_budget(int n_spins, std::uint64_t budget_bytes, int preferred);

}  // namespace mqc
