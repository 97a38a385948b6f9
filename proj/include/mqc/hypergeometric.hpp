#pragma once

namespace mqc {

/// Gauss hypergeometric 2F1(a, b; c; x) by direct power series for 0 <= x < 1.
///
/// Summation stops once a term drops below 1e-15 of the partial sum. Throws
/// std::domain_error if x >= 1 - 1e-8 or x < 0, and mqc::ConvergenceError if
/// 10^6 terms are not enough.
double hyp2f1_series(double a, double b, double c, double x);

/// Generalized harmonic number H_x = psi(x + 1) + Euler gamma for x = n or
/// x = n - 1/2 (n >= 0 integer). H_{-1/2} = -2 ln 2.
double harmonic_number(double x);

/// log of the binomial coefficient C(n, k) for real n >= k >= 0.
double log_binomial(double n, double k);

}  // namespace mqc
