#include "mqc/hypergeometric.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mqc/core.hpp"

namespace mqc {

double hyp2f1_series(double a, double b, double c, double x) {
    if (!(x >= 0.0)) throw std::domain_error("2F1 series: argument must be >= 0");
    if (x >= 1.0 - 1e-8) throw std::domain_error("2F1 series: argument too close to 1 for convergence");
    if (c <= 0.0 && std::floor(c) == c) throw std::domain_error("2F1 series: c must not be a non-positive integer");

    constexpr long kMaxTerms = 1'000'000;
    double sum = 1.0;
    double term = 1.0;
    for (long n = 0; n < kMaxTerms; ++n) {
        const double dn = static_cast<double>(n);
        term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * x;
        sum += term;
        if (std::abs(term) < 1e-15 * std::abs(sum)) return sum;
    }
    throw ConvergenceError("2F1 series did not converge", std::abs(term));
}

double harmonic_number(double x) {
    const double twice = 2.0 * x;
    if (std::abs(twice - std::round(twice)) > 1e-12 || x < -0.5) {
        throw std::domain_error("harmonic_number: x must be an integer or half-integer >= -1/2");
    }
    const long n2 = std::lround(twice);
    if (n2 % 2 == 0) {
        double h = 0.0;
        for (long k = 1; k <= n2 / 2; ++k) h += 1.0 / static_cast<double>(k);
        return h;
    }
    // x = n - 1/2 with n = (n2 + 1) / 2; H_{n-1/2} = -2 ln 2 + sum_{k=1}^{n} 2 / (2k - 1)
    const long n = (n2 + 1) / 2;
    double h = -2.0 * std::numbers::ln2;
    for (long k = 1; k <= n; ++k) h += 2.0 / static_cast<double>(2 * k - 1);
    return h;
}

double log_binomial(double n, double k) {
    if (k < 0.0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace mqc
