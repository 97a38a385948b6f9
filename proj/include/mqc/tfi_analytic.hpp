#pragma once

#include <vector>

#include "mqc/core.hpp"

/// Free-fermion solution of the periodic transverse-field Ising chain
///   H = -(chi/2) sum s_i s_{i+1} - (omega/2) sum sigma^x_i,   g = omega / chi.
/// Energies below are in units where the chain reads -sum s s - g sum sigma^x.
namespace mqc::tfi {

/// Half-zone antiperiodic momenta k = 2 pi (n + 1/2) / N in (0, pi); floor(N/2) modes.
std::vector<double> quasimomentum_grid(int n_spins);

/// eps_k = 2 sqrt(g^2 - 2 g cos k + 1).
double dispersion(double k, double g);

/// theta_k = atan2(sin k, cos k - g), continuous in g for k in (0, pi).
double bogoliubov_angle(double k, double g);

/// prod_k [1 - sin^2(phi) f(k, g)], f = 1 / (1 + (cos k - g)^2 / sin^2 k).
/// Accumulated in logs; results below e^-700 flush to zero.
double fotoc_product(double g, double phi, int n_spins);

struct FotocDerivatives {
    double value = 0.0;
    double d_dg = 0.0;
    double d2_dg2 = 0.0;
};

/// Product-form FOTOC with its first and second derivatives in g, analytically.
FotocDerivatives fotoc_product_derivatives(double g, double phi, int n_spins);

/// Closed form 4/(1+g^N) (|sin phi|/2)^N cos(N asin sqrt X+) cos(N asin sqrt X-),
/// evaluated over complex numbers with principal branches. Valid for odd and
/// even N. Throws std::runtime_error if the imaginary residue exceeds 1e-8.
double fotoc_closed_form(double g, double phi, int n_spins);

/// X_{+/-}(g, phi) as complex numbers.
std::pair<Complex, Complex> closed_form_roots(double g, double phi);

/// Large-N form exp(-N lambda_phi(g)); throws std::domain_error at g = 1.
double fotoc_continuum(double g, double phi, int n_spins);

/// Exact spectrum at g = 1: (2/4^N) C(2N, N-m) for even m, 0 otherwise.
double mqc_critical(int n_spins, int m);

/// Gaussian large-N ferromagnetic spectrum 2/sqrt(pi N) exp(-m^2/N) (even m).
double mqc_ferromagnetic_largeN(int n_spins, int m);

enum class FotocForm { Product, ClosedForm };

/// Spectrum from a K-point DFT of the exact FOTOC (K = 2N + 2 by default).
/// The product form is the default since it stays finite for large N.
MqcSpectrum mqc_from_fotoc_analytic(double g, int n_spins, int phi_points = 0,
                                    FotocForm form = FotocForm::Product);

/// d^2 I_m / dg^2 from the DFT of the analytic second derivative of the FOTOC.
double mqc_second_derivative(double g, int n_spins, int m, int phi_points = 0);

/// I_m alone (cheaper than the full spectrum).
double mqc_intensity(double g, int n_spins, int m, int phi_points = 0);

}  // namespace mqc::tfi
