#include "mqc/lanczos.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "mqc/tridiagonal.hpp"

namespace mqc {

namespace {

// Average each amplitude with its global-flip partner, keeping v in the flip-even sector.
void symmetrize_flip(Eigen::VectorXd& v) {
    const auto dim = static_cast<std::uint64_t>(v.size());
    const std::uint64_t mask = dim - 1;
    for (std::uint64_t b = 0; b < dim; ++b) {
        const std::uint64_t p = ~b & mask;
        if (b < p) {
            const double avg = 0.5 * (v[static_cast<Eigen::Index>(b)] + v[static_cast<Eigen::Index>(p)]);
            v[static_cast<Eigen::Index>(b)] = avg;
            v[static_cast<Eigen::Index>(p)] = avg;
        }
    }
}

void fix_sign(Eigen::VectorXd& v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
}

double operator_scale(const lattice::SparseSpinHamiltonian& h) {
    return std::max(1.0, h.diagonal().cwiseAbs().maxCoeff() + 0.5 * std::abs(h.transverse_amplitude()) * h.n_spins());
}

}  // namespace

StateVector LanczosResult::state(const SpinBasis& basis) const {
    return StateVector::normalized(basis, vector.cast<Complex>());
}

SectorFilter resolve_sector(const lattice::SparseSpinHamiltonian& h, SectorFilter requested) {
    if (requested != SectorFilter::Auto) return requested;
    if (lattice::has_symmetric_sector(h.spec())) return SectorFilter::Symmetric;
    if (h.spec().has_flip_symmetry()) return SectorFilter::FlipEven;
    return SectorFilter::None;
}

int lanczos_basis_for_budget(int n_spins, std::uint64_t budget_bytes, int preferred) {
    const std::uint64_t per_vector = (std::uint64_t{1} << n_spins) * sizeof(double);
    // Leave room for the working vectors outside the basis.
    const std::uint64_t fit = budget_bytes / per_vector;
    const auto usable = fit > 4 ? static_cast<int>(std::min<std::uint64_t>(fit - 4, 1u << 20)) : 0;
    return std::max(8, std::min(preferred, usable));
}

LanczosResult lanczos_lowest(Eigen::Index dim, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
                             const std::function<void(Eigen::VectorXd&)>& project, double scale,
                             const LanczosOptions& options) {
    const auto proj = [&](Eigen::VectorXd& v) {
        if (project) project(v);
    };
    Eigen::VectorXd v;
    if (options.start && options.start->size() == dim) {
        v = *options.start;
    } else {
        std::mt19937_64 engine(options.seed);
        v.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = static_cast<double>(engine() >> 11) * 0x1.0p-53 - 0.5;
    }
    proj(v);
    if (!(v.norm() > 0.0)) throw std::invalid_argument("lanczos: start vector vanishes after projection");
    v.normalize();

    const int cycle = std::max(2, static_cast<int>(std::min<Eigen::Index>(options.basis_size, dim)));
    LanczosResult best;
    best.residual = std::numeric_limits<double>::infinity();
    int applications = 0;
    Eigen::MatrixXd basis(dim, cycle);
    Eigen::VectorXd w(dim), hx(dim);

    while (applications < options.max_iter) {
        basis.col(0) = v;
        std::vector<double> alpha, beta;
        TridiagonalEigen ritz;
        for (int j = 0; j < cycle && applications < options.max_iter; ++j) {
            apply(basis.col(j), w);
            ++applications;
            alpha.push_back(basis.col(j).dot(w));
            // Full reorthogonalization (classical Gram-Schmidt, twice).
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXd c = basis.leftCols(j + 1).transpose() * w;
                w.noalias() -= basis.leftCols(j + 1) * c;
                proj(w);
            }
            const double b = w.norm();
            ritz = tridiagonal_lowest(alpha, beta, 1);
            const double estimate = b * std::abs(ritz.vectors(static_cast<Eigen::Index>(alpha.size()) - 1, 0));
            if (b < 1e-13 * scale || estimate < 0.1 * options.tol || j + 1 == cycle) break;
            beta.push_back(b);
            basis.col(j + 1) = w / b;
        }
        const auto m = static_cast<Eigen::Index>(alpha.size());
        // Ritz vector and its true residual.
        Eigen::VectorXd x = basis.leftCols(m) * ritz.vectors.col(0).head(m);
        proj(x);
        x.normalize();
        apply(x, hx);
        ++applications;
        const double energy = x.dot(hx);
        const double residual = (hx - energy * x).norm();
        if (residual < best.residual) {
            best.energy = energy;
            best.vector = x;
            best.residual = residual;
        }
        if (residual < options.tol) break;
        v = x;
    }
    best.iterations = applications;
    if (!(best.residual < options.tol)) throw ConvergenceError("Lanczos did not converge", best.residual);
    return best;
}

LanczosResult lanczos_lowest(const lattice::SparseSpinHamiltonian& h, const LanczosOptions& options) {
    const SectorFilter sector = resolve_sector(h, options.sector);
    const double scale = operator_scale(h);
    LanczosResult result;
    if (sector == SectorFilter::Symmetric) {
        if (!lattice::has_symmetric_sector(h.spec())) throw std::invalid_argument("lanczos: model has no symmetric sector");
        const auto sec = lattice::SymmetricSector::cached(h.n_spins());
        const Eigen::VectorXd diag = sec->restrict_diagonal(h.diagonal());
        const double omega = h.spec().omega;
        LanczosOptions reduced = options;
        if (options.start && options.start->size() == static_cast<Eigen::Index>(h.dimension())) {
            reduced.start = sec->restrict(*options.start);
        } else {
            reduced.start.reset();
        }
        std::vector<Eigen::VectorXd> deflate;
        for (const auto& d : options.deflate) deflate.push_back(sec->restrict(d));
        const auto project = [&](Eigen::VectorXd& v) {
            for (const auto& d : deflate) v -= d.dot(v) * d;
        };
        result = lanczos_lowest(
            static_cast<Eigen::Index>(sec->dimension()),
            [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { sec->apply(diag, omega, in, out); },
            project, scale, reduced);
        result.vector = sec->expand(result.vector);
    } else {
        const bool flip_even = sector == SectorFilter::FlipEven;
        const auto project = [&](Eigen::VectorXd& v) {
            if (flip_even) symmetrize_flip(v);
            for (const auto& d : options.deflate) v -= d.dot(v) * d;
        };
        result = lanczos_lowest(
            static_cast<Eigen::Index>(h.dimension()),
            [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { h.apply(in, out); }, project, scale, options);
    }
    fix_sign(result.vector);
    return result;
}

GroundState lanczos_ground_state(const lattice::SparseSpinHamiltonian& h, int max_iter, double tol) {
    LanczosOptions options;
    options.max_iter = max_iter;
    options.tol = tol;
    const LanczosResult r = lanczos_lowest(h, options);
    return {r.energy, r.state(h.basis()), r.residual};
}

double lanczos_gap(const lattice::SparseSpinHamiltonian& h, const LanczosOptions& options) {
    const LanczosResult ground = lanczos_lowest(h, options);
    LanczosOptions excited = options;
    excited.start.reset();
    excited.deflate.push_back(ground.vector);
    const LanczosResult first = lanczos_lowest(h, excited);
    return first.energy - ground.energy;
}

}  // namespace mqc
