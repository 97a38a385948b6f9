#include "mqc/lmg.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "mqc/hypergeometric.hpp"
#include "mqc/tridiagonal.hpp"

namespace mqc::lmg {

namespace {

double ladder(double s, double m) { return std::sqrt(std::max(0.0, s * (s + 1.0) - m * (m + 1.0))); }

// H restricted to span{(|m> + |-m>)/sqrt2 : m > 0} (+ |0> for even N), indexed by
// ascending m >= 0. Still tridiagonal.
struct FoldedMatrix {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;
};

FoldedMatrix fold_even(const LmgHamiltonian& h) {
    const int n = h.n_spins;
    const double s = 0.5 * n;
    const bool even_n = n % 2 == 0;
    const int size = n / 2 + 1;
    FoldedMatrix f;
    f.diagonal.resize(static_cast<std::size_t>(size));
    f.off_diagonal.resize(static_cast<std::size_t>(size - 1));
    for (int j = 0; j < size; ++j) {
        const double m = even_n ? j : j + 0.5;
        f.diagonal[static_cast<std::size_t>(j)] = -h.chi * m * m / n;
        if (j + 1 < size) f.off_diagonal[static_cast<std::size_t>(j)] = -0.5 * h.omega * ladder(s, m);
    }
    if (even_n) {
        if (size > 1) f.off_diagonal[0] *= std::numbers::sqrt2;
    } else {
        // <u_{1/2}|H|u_{1/2}> picks up the -1/2 <-> +1/2 hop.
        f.diagonal[0] += -0.5 * h.omega * ladder(s, -0.5);
    }
    return f;
}

Eigen::VectorXd unfold_even(int n_spins, const Eigen::VectorXd& folded) {
    const int dim = n_spins + 1;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(dim);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    if (n_spins % 2 == 0) {
        const int mid = n_spins / 2;
        full[mid] = folded[0];
        for (int j = 1; j < folded.size(); ++j) {
            full[mid + j] = folded[j] * inv_sqrt2;
            full[mid - j] = folded[j] * inv_sqrt2;
        }
    } else {
        const int half = (n_spins + 1) / 2;  // index of m = +1/2
        for (int j = 0; j < folded.size(); ++j) {
            full[half + j] = folded[j] * inv_sqrt2;
            full[half - 1 - j] = folded[j] * inv_sqrt2;
        }
    }
    return full;
}

}  // namespace

Eigen::MatrixXd LmgHamiltonian::dense() const {
    const auto dim = static_cast<Eigen::Index>(diagonal.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = diagonal[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < dim; ++i) {
        m(i + 1, i) = off_diagonal[static_cast<std::size_t>(i)];
        m(i, i + 1) = off_diagonal[static_cast<std::size_t>(i)];
    }
    return m;
}

LmgHamiltonian build_lmg(const ModelSpec& spec) {
    if (spec.model != ModelKind::LMG) throw std::invalid_argument("build_lmg: model must be LMG");
    spec.validate();
    LmgHamiltonian h;
    h.n_spins = spec.n_spins;
    h.chi = spec.chi;
    h.omega = spec.omega;
    const int n = spec.n_spins;
    const double s = 0.5 * n;
    h.diagonal.resize(static_cast<std::size_t>(n + 1));
    h.off_diagonal.resize(static_cast<std::size_t>(n));
    for (int i = 0; i <= n; ++i) {
        const double m = i - s;
        h.diagonal[static_cast<std::size_t>(i)] = -spec.chi * m * m / n;
        if (i < n) h.off_diagonal[static_cast<std::size_t>(i)] = -0.5 * spec.omega * ladder(s, m);
    }
    return h;
}

StateVector lmg_ground_state(const LmgHamiltonian& h) {
    const FoldedMatrix f = fold_even(h);
    TridiagonalEigen eig = tridiagonal_lowest(f.diagonal, f.off_diagonal, 1);
    Eigen::VectorXd folded = eig.vectors.col(0);

    // Residual of the folded eigenproblem.
    const auto size = folded.size();
    double residual = 0.0;
    for (Eigen::Index j = 0; j < size; ++j) {
        double hv = f.diagonal[static_cast<std::size_t>(j)] * folded[j];
        if (j > 0) hv += f.off_diagonal[static_cast<std::size_t>(j - 1)] * folded[j - 1];
        if (j + 1 < size) hv += f.off_diagonal[static_cast<std::size_t>(j)] * folded[j + 1];
        residual = std::max(residual, std::abs(hv - eig.values[0] * folded[j]));
    }
    const double scale = 1.0 + std::abs(h.chi) * h.n_spins + std::abs(h.omega) * h.n_spins;
    if (!std::isfinite(residual) || residual > 1e-9 * scale) {
        throw ConvergenceError("LMG ground state eigensolver failed", residual);
    }

    Eigen::VectorXd full = unfold_even(h.n_spins, folded);
    full /= full.norm();
    return StateVector(h.basis(), full.cast<Complex>()).phase_fixed();
}

std::vector<double> lmg_even_sector_levels(const LmgHamiltonian& h, int count) {
    const FoldedMatrix f = fold_even(h);
    const int size = static_cast<int>(f.diagonal.size());
    const TridiagonalEigen eig = tridiagonal_lowest(f.diagonal, f.off_diagonal, std::min(count, size), false);
    return {eig.values.data(), eig.values.data() + eig.values.size()};
}

SxEigenbasis::SxEigenbasis(int n_spins) : n_spins_(n_spins) {
    if (n_spins < 1) throw std::invalid_argument("SxEigenbasis needs N >= 1");
    const double s = 0.5 * n_spins;
    std::vector<double> diag(static_cast<std::size_t>(n_spins + 1), 0.0);
    std::vector<double> off(static_cast<std::size_t>(n_spins));
    for (int i = 0; i < n_spins; ++i) off[static_cast<std::size_t>(i)] = 0.5 * ladder(s, i - s);
    TridiagonalEigen eig = tridiagonal_all(diag, off);
    // Eigenvalues are exactly -S..S; snap away rounding.
    values_.resize(n_spins + 1);
    for (int i = 0; i <= n_spins; ++i) values_[i] = i - s;
    vectors_ = std::move(eig.vectors);
    for (Eigen::Index j = 0; j < vectors_.cols(); ++j) {
        Eigen::Index imax = 0;
        vectors_.col(j).cwiseAbs().maxCoeff(&imax);
        if (vectors_(imax, j) < 0.0) vectors_.col(j) *= -1.0;
    }
}

Eigen::VectorXcd SxEigenbasis::to_x_basis(const Eigen::VectorXcd& z_amplitudes) const {
    return vectors_.transpose().cast<Complex>() * z_amplitudes;
}

Eigen::VectorXcd SxEigenbasis::from_x_basis(const Eigen::VectorXcd& x_amplitudes) const {
    return vectors_.cast<Complex>() * x_amplitudes;
}

Eigen::VectorXcd SxEigenbasis::rotate(const Eigen::VectorXcd& z_amplitudes, double phi) const {
    Eigen::VectorXcd x = to_x_basis(z_amplitudes);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] *= std::exp(Complex(0.0, -phi * values_[i]));
    return from_x_basis(x);
}

Eigen::MatrixXcd SxEigenbasis::rotate_columns(const Eigen::VectorXcd& z_amplitudes, const std::vector<double>& phis) const {
    const Eigen::VectorXcd x = to_x_basis(z_amplitudes);
    const auto k = static_cast<Eigen::Index>(phis.size());
    Eigen::MatrixXcd rotated(x.size(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            rotated(i, j) = x[i] * std::exp(Complex(0.0, -phis[static_cast<std::size_t>(j)] * values_[i]));
        }
    }
    return vectors_.cast<Complex>() * rotated;
}

StateVector SxEigenbasis::polarized_x() const {
    Eigen::VectorXd v = vectors_.col(n_spins_);
    // Binomial amplitudes are all positive; fix the overall sign accordingly.
    if (v.sum() < 0.0) v = -v;
    return StateVector::normalized(SpinBasis::dicke(n_spins_), v.cast<Complex>());
}

std::shared_ptr<const SxEigenbasis> SxEigenbasis::cached(int n_spins) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const SxEigenbasis>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n_spins);
    if (it != cache.end()) return it->second;
    auto basis = std::make_shared<const SxEigenbasis>(n_spins);
    cache.emplace(n_spins, basis);
    return basis;
}

MqcSpectrum mqc_of_state(const StateVector& state) {
    if (state.basis().kind != BasisKind::DickeZ) throw std::invalid_argument("lmg::mqc_of_state needs a Dicke state");
    const int n = state.basis().n_spins;
    const auto sx = SxEigenbasis::cached(n);
    const Eigen::VectorXd p = sx->to_x_basis(state.amplitudes()).cwiseAbs2();
    std::vector<Complex> intensities(static_cast<std::size_t>(2 * n + 1));
    for (int m = -n; m <= n; ++m) {
        double acc = 0.0;
        for (int a = std::max(0, -m); a <= n && a + m <= n; ++a) acc += p[a] * p[a + m];
        intensities[static_cast<std::size_t>(m + n)] = acc;
    }
    return MqcSpectrum(n, std::move(intensities), SpectrumKind::TrueEcho);
}

double fotoc_of_state(const StateVector& state, double phi) {
    const auto sx = SxEigenbasis::cached(state.basis().n_spins);
    return std::norm(state.amplitudes().dot(sx->rotate(state.amplitudes(), phi)));
}

SqueezeParameter SqueezeParameter::from_field_ratio(double omega_over_chi) {
    if (!(omega_over_chi > 1.0)) {
        throw std::domain_error("squeeze parameter defined only in the paramagnetic phase omega/chi > 1");
    }
    return {0.5 * std::atanh(1.0 / (2.0 * omega_over_chi - 1.0))};
}

double hp_intensity(int m, double omega_over_chi) {
    const SqueezeParameter sq = SqueezeParameter::from_field_ratio(omega_over_chi);
    m = std::abs(m);
    if (m % 2 != 0) return 0.0;
    const double t = std::tanh(sq.r);
    const double sech = 1.0 / std::cosh(sq.r);
    const double x = t * t * t * t;
    // C(m, m/2) / 2^m * t^m, in logs to survive large m.
    double log_pref = log_binomial(m, 0.5 * m) - m * std::numbers::ln2;
    if (m > 0) {
        if (t == 0.0) return 0.0;
        log_pref += m * std::log(t);
    }
    return sech * sech * std::exp(log_pref) * hyp2f1_series(0.5, 0.5 * (1.0 + m), 0.5 * (2.0 + m), x);
}

double hp_intensity_near_critical(int m, double omega_over_chi) {
    if (!(omega_over_chi > 1.0)) throw std::domain_error("near-critical expansion needs omega/chi > 1");
    const double eps = omega_over_chi - 1.0;
    const double h = harmonic_number(0.5 * (std::abs(m) - 1));
    return 2.0 / std::numbers::pi * std::sqrt(eps) * (-2.0 * h - 2.0 * std::numbers::ln2 - std::log(eps));
}

double hp_second_derivative_asymptote(int m, double omega_over_chi) {
    if (!(omega_over_chi > 1.0)) throw std::domain_error("near-critical expansion needs omega/chi > 1");
    const double eps = omega_over_chi - 1.0;
    const double h = harmonic_number(0.5 * (std::abs(m) - 1));
    return (std::log(4.0) + 2.0 * h + std::log(eps)) / (2.0 * std::numbers::pi * std::pow(eps, 1.5));
}

double ghz_intensity(int n_spins, int m) {
    if (n_spins < 1) throw std::invalid_argument("ghz_intensity needs N >= 1");
    m = std::abs(m);
    if (m % 2 != 0 || m > n_spins) return 0.0;
    const double n = n_spins;
    const double log4n = n * std::log(4.0);
    double value = 2.0 * std::exp(log_binomial(2.0 * n, n - m) - log4n);
    if ((n_spins - m) % 2 == 0) {
        const double sign = (m / 2) % 2 == 0 ? 1.0 : -1.0;
        value += sign * 2.0 * std::exp(log_binomial(n, 0.5 * (n - m)) - log4n);
    }
    return value;
}

}  // namespace mqc::lmg
