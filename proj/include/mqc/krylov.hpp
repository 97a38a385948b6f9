#pragma once

#include <functional>

#include <Eigen/Dense>

namespace mqc {

/// out = H in for a Hermitian H.
using ComplexOperator = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

struct KrylovOptions {
    int dimension = 20;
    double tol = 1e-10;          // local error estimate per sub-step
    int max_substeps = 1 << 16;  // per call
};

struct KrylovStats {
    int substeps = 0;
    int applications = 0;
    double max_error = 0.0;
};

/// v <- exp(-i sign H dt) v by Lanczos-Krylov projection with adaptive sub-steps.
/// The error estimate is beta_m |e_m^T exp(-i h T) e_1| |v|. Throws
/// ConvergenceError if the sub-step budget runs out.
KrylovStats krylov_propagate(const ComplexOperator& h, Eigen::VectorXcd& v, double dt, int sign,
                             const KrylovOptions& options = {});

}  // namespace mqc
