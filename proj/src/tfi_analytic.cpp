#include "mqc/tfi_analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "mqc/hypergeometric.hpp"

namespace mqc::tfi {

namespace {

constexpr double kLogFloor = -700.0;

struct ModeWeight {
    double f;
    double df;
    double d2f;
};

ModeWeight mode_weight(double k, double g) {
    const double s = std::sin(k);
    const double c = std::cos(k);
    const double s2 = s * s;
    const double u = c - g;
    const double d = s2 + u * u;
    return {s2 / d, 2.0 * s2 * u / (d * d), 2.0 * s2 * (-1.0 / (d * d) + 4.0 * u * u / (d * d * d))};
}

// F(phi_j) depends on sin^2 only, so on a uniform grid many samples coincide.
int fold_index(int j, int points) {
    if (points % 2 == 0) {
        const int half = points / 2;
        const int r = j % half;
        return std::min(r, half - r);
    }
    return std::min(j, points - j);
}

template <class Fn>
std::vector<double> sample_folded(int points, Fn&& fn) {
    std::unordered_map<int, double> cache;
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        const int key = fold_index(j, points);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, fn(2.0 * std::numbers::pi * key / points)).first;
        out[static_cast<std::size_t>(j)] = it->second;
    }
    return out;
}

int resolve_points(int n_spins, int phi_points) {
    const int k = phi_points > 0 ? phi_points : default_phi_points(n_spins);
    if (k < 2 * n_spins + 1) throw std::invalid_argument("phi grid must have at least 2N+1 points");
    return k;
}

double cosine_transform(const std::vector<double>& samples, int m) {
    const auto k = static_cast<int>(samples.size());
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
        // Reduce the product index first so large m * j keeps full precision.
        const long long idx = (static_cast<long long>(m) * j) % k;
        acc += samples[static_cast<std::size_t>(j)] * std::cos(2.0 * std::numbers::pi * static_cast<double>(idx) / k);
    }
    return acc / k;
}

}  // namespace

std::vector<double> quasimomentum_grid(int n_spins) {
    if (n_spins < 2) throw std::invalid_argument("quasimomentum grid needs N >= 2");
    std::vector<double> ks(static_cast<std::size_t>(n_spins / 2));
    for (int n = 0; n < n_spins / 2; ++n) ks[static_cast<std::size_t>(n)] = 2.0 * std::numbers::pi * (n + 0.5) / n_spins;
    return ks;
}

double dispersion(double k, double g) {
    return 2.0 * std::sqrt(std::max(0.0, g * g - 2.0 * g * std::cos(k) + 1.0));
}

double bogoliubov_angle(double k, double g) { return std::atan2(std::sin(k), std::cos(k) - g); }

namespace {

std::vector<ModeWeight> mode_weights(double g, int n_spins) {
    const auto ks = quasimomentum_grid(n_spins);
    std::vector<ModeWeight> w(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) w[i] = mode_weight(ks[i], g);
    return w;
}

FotocDerivatives derivatives_from_weights(const std::vector<ModeWeight>& weights, double phi) {
    const double s2 = std::sin(phi) * std::sin(phi);
    if (s2 == 0.0) return {1.0, 0.0, 0.0};
    const std::size_t n = weights.size();
    double log_f = 0.0;
    double first = 0.0;
    double second = 0.0;
    bool has_zero = false;
    for (const ModeWeight& w : weights) {
        const double a = 1.0 - s2 * w.f;
        if (a <= 1e-300) {
            has_zero = true;
            break;
        }
        log_f += std::log(a);
        const double r = -s2 * w.df / a;
        first += r;
        second += -s2 * w.d2f / a - r * r;
    }
    if (!has_zero) {
        if (log_f < kLogFloor) return {0.0, 0.0, 0.0};
        const double f = std::exp(log_f);
        return {f, f * first, f * (first * first + second)};
    }
    // Leibniz rule directly; only hit when some factor vanishes exactly.
    std::vector<double> a(n), da(n), d2a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = 1.0 - s2 * weights[i].f;
        da[i] = -s2 * weights[i].df;
        d2a[i] = -s2 * weights[i].d2f;
    }
    FotocDerivatives out;
    for (std::size_t i = 0; i < n; ++i) {
        double rest = 1.0;
        for (std::size_t j = 0; j < n; ++j) if (j != i) rest *= a[j];
        out.d_dg += da[i] * rest;
        out.d2_dg2 += d2a[i] * rest;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double rest2 = 1.0;
            for (std::size_t l = 0; l < n; ++l) if (l != i && l != j) rest2 *= a[l];
            out.d2_dg2 += da[i] * da[j] * rest2;
        }
    }
    return out;
}

}  // namespace

namespace {

double product_from_weights(const std::vector<ModeWeight>& weights, double phi) {
    const double s2 = std::sin(phi) * std::sin(phi);
    if (s2 == 0.0) return 1.0;
    double log_f = 0.0;
    for (const ModeWeight& w : weights) {
        const double a = 1.0 - s2 * w.f;
        if (a <= 0.0) return 0.0;
        log_f += std::log(a);
    }
    return log_f < kLogFloor ? 0.0 : std::exp(log_f);
}

}  // namespace


double fotoc_product(double g, double phi, int n_spins) {
    return product_from_weights(mode_weights(g, n_spins), phi);
}

FotocDerivatives fotoc_product_derivatives(double g, double phi, int n_spins) {
    return derivatives_from_weights(mode_weights(g, n_spins), phi);
}

std::pair<Complex, Complex> closed_form_roots(double g, double phi) {
    const double s2 = std::sin(phi) * std::sin(phi);
    if (s2 == 0.0) throw std::domain_error("closed_form_roots: undefined at sin(phi) = 0");
    // D = 1 - s^2 (1 + 1/g^2) + s^4 / g^2, with 1 - D kept separately so small s survives.
    const double one_minus_d = s2 * ((1.0 + 1.0 / (g * g)) - s2 / (g * g));
    const Complex root = std::sqrt(Complex(1.0 - one_minus_d, 0.0));
    const Complex one_minus = one_minus_d / (1.0 + root);
    const Complex x_plus = 0.5 * (1.0 - (g / s2) * one_minus);
    const Complex x_minus = 0.5 * (1.0 - (g / s2) * (1.0 + root));
    return {x_plus, x_minus};
}

namespace {

// log cos z without overflow for large |Im z|.
Complex log_cos(Complex z) {
    if (std::abs(z.imag()) < 20.0) return std::log(std::cos(z));
    const Complex iz(-z.imag(), z.real());
    const Complex lead = z.imag() > 0.0 ? -iz : iz;
    return lead + std::log(0.5 * (1.0 + std::exp(-2.0 * lead)));
}

}  // namespace

double fotoc_closed_form(double g, double phi, int n_spins) {
    if (n_spins < 2) throw std::invalid_argument("fotoc_closed_form needs N >= 2");
    if (!(g > 0.0)) throw std::domain_error("fotoc_closed_form needs g > 0");
    const double s = std::abs(std::sin(phi));
    if (s == 0.0) return 1.0;
    const auto [xp, xm] = closed_form_roots(g, phi);
    const double n = n_spins;
    // 4 / (1 + g^N) (s/2)^N in logs.
    const double log_gn = n * std::log(g);
    const double log_den = log_gn > 0.0 ? log_gn + std::log1p(std::exp(-log_gn)) : std::log1p(std::exp(log_gn));
    const double log_pref = std::log(4.0) - log_den + n * std::log(0.5 * s);
    const Complex log_value = log_pref + log_cos(n * std::asin(std::sqrt(xp))) + log_cos(n * std::asin(std::sqrt(xm)));
    const Complex value = std::exp(log_value);
    if (std::abs(value.imag()) > 1e-8 * std::max(1.0, std::abs(value))) {
        throw std::runtime_error("fotoc_closed_form: branch inconsistency, imaginary residue " +
                                 std::to_string(value.imag()));
    }
    return value.real();
}

double fotoc_continuum(double g, double phi, int n_spins) {
    if (g == 1.0) throw std::domain_error("fotoc_continuum is undefined at g = 1");
    const double s2 = std::sin(phi) * std::sin(phi);
    const double a1 = g < 1.0 ? 0.25 : 0.25 / (g * g);
    const double lambda = -std::log(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * s2 * a1))));
    return std::exp(-n_spins * lambda);
}

double mqc_critical(int n_spins, int m) {
    m = std::abs(m);
    if (m % 2 != 0 || m > n_spins) return 0.0;
    const double n = n_spins;
    return 2.0 * std::exp(log_binomial(2.0 * n, n - m) - n * std::log(4.0));
}

double mqc_ferromagnetic_largeN(int n_spins, int m) {
    if (m % 2 != 0) return 0.0;
    const double n = n_spins;
    return 2.0 / std::sqrt(std::numbers::pi * n) * std::exp(-static_cast<double>(m) * m / n);
}

MqcSpectrum mqc_from_fotoc_analytic(double g, int n_spins, int phi_points, FotocForm form) {
    const int k = resolve_points(n_spins, phi_points);
    const auto weights = mode_weights(g, n_spins);
    const auto samples = sample_folded(k, [&](double phi) {
        return form == FotocForm::Product ? product_from_weights(weights, phi) : fotoc_closed_form(g, phi, n_spins);
    });
    std::vector<Complex> intensities(static_cast<std::size_t>(2 * n_spins + 1));
    for (int m = 0; m <= n_spins; ++m) {
        const double v = cosine_transform(samples, m);
        intensities[static_cast<std::size_t>(n_spins + m)] = v;
        intensities[static_cast<std::size_t>(n_spins - m)] = v;
    }
    return MqcSpectrum(n_spins, std::move(intensities), SpectrumKind::Analytic);
}

double mqc_intensity(double g, int n_spins, int m, int phi_points) {
    const int k = resolve_points(n_spins, phi_points);
    const auto weights = mode_weights(g, n_spins);
    const auto samples = sample_folded(k, [&](double phi) { return product_from_weights(weights, phi); });
    return cosine_transform(samples, m);
}

double mqc_second_derivative(double g, int n_spins, int m, int phi_points) {
    const int k = resolve_points(n_spins, phi_points);
    const auto weights = mode_weights(g, n_spins);
    const auto samples = sample_folded(k, [&](double phi) { return derivatives_from_weights(weights, phi).d2_dg2; });
    return cosine_transform(samples, m);
}

}  // namespace mqc::tfi
