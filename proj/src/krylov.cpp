#include "mqc/krylov.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mqc/core.hpp"

namespace mqc {

namespace {

// exp(-i sign s T) e_1 for the tridiagonal T = tri(alpha, beta).
struct SmallPropagator {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;

    SmallPropagator(const std::vector<double>& alpha, const std::vector<double>& beta) {
        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
        energies = eig.eigenvalues();
        vectors = eig.eigenvectors();
    }

    Eigen::VectorXcd apply(double s, int sign) const {
        const auto m = energies.size();
        Eigen::VectorXcd phases(m);
        for (Eigen::Index k = 0; k < m; ++k) phases[k] = std::exp(Complex(0.0, -sign * s * energies[k])) * vectors(0, k);
        Eigen::VectorXcd y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            Complex acc = 0.0;
            for (Eigen::Index k = 0; k < m; ++k) acc += vectors(i, k) * phases[k];
            y[i] = acc;
        }
        return y;
    }
};

}  // namespace

KrylovStats krylov_propagate(const ComplexOperator& h, Eigen::VectorXcd& v, double dt, int sign,
                             const KrylovOptions& options) {
    if (!(dt > 0.0)) throw std::invalid_argument("krylov_propagate: dt must be > 0");
    if (sign != 1 && sign != -1) throw std::invalid_argument("krylov_propagate: sign must be +1 or -1");
    KrylovStats stats;
    const auto dim = v.size();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(options.dimension, dim));
    Eigen::MatrixXcd basis(dim, m_max);
    Eigen::VectorXcd w(dim);

    double remaining = dt;
    double step = dt;
    while (remaining > 0.0) {
        if (stats.substeps >= options.max_substeps) throw ConvergenceError("Krylov sub-step budget exhausted", stats.max_error);
        step = std::min(step, remaining);
        const double norm0 = v.norm();
        basis.col(0) = v / norm0;
        std::vector<double> alpha, beta;
        double tail = 0.0;  // coupling out of the subspace
        for (int j = 0; j < m_max; ++j) {
            h(basis.col(j), w);
            ++stats.applications;
            alpha.push_back(basis.col(j).dot(w).real());
            // Classical Gram-Schmidt against the whole basis, twice.
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXcd c = basis.leftCols(j + 1).adjoint() * w;
                w.noalias() -= basis.leftCols(j + 1) * c;
            }
            const double b = w.norm();
            tail = b;
            if (b < 1e-12 * (1.0 + std::abs(alpha.back()))) {
                tail = 0.0;  // invariant subspace: projection is exact
                break;
            }
            if (j + 1 == m_max) break;
            // Stop growing once the current subspace already meets the tolerance.
            if (j >= 3 && j % 2 == 1) {
                const SmallPropagator trial(alpha, beta);
                if (b * std::abs(trial.apply(step, sign)[j]) * norm0 <= 0.1 * options.tol) break;
            }
            beta.push_back(b);
            basis.col(j + 1) = w / b;
        }
        const auto m = static_cast<Eigen::Index>(alpha.size());
        const SmallPropagator prop(alpha, beta);

        // Halve the sub-step until the estimate passes.
        Eigen::VectorXcd y;
        double error = 0.0;
        for (;;) {
            y = prop.apply(step, sign);
            error = tail * std::abs(y[m - 1]) * norm0;
            if (error <= options.tol || step < 1e-14 * dt) break;
            step *= 0.5;
        }
        if (error > options.tol) throw ConvergenceError("Krylov step cannot meet tolerance", error);

        v.noalias() = norm0 * (basis.leftCols(m) * y);
        stats.max_error = std::max(stats.max_error, error);
        ++stats.substeps;
        remaining -= step;
        if (remaining < 1e-15 * dt) remaining = 0.0;
        // Let the next sub-step grow again after an easy one.
        if (error < 0.01 * options.tol) step *= 2.0;
    }
    return stats;
}

}  // namespace mqc
