#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mqc/lattice.hpp"
#include "mqc/lmg.hpp"
#include "oracles.hpp"

using namespace mqc;

namespace {

ModelSpec lmg_spec(int n, double chi, double omega) {
    ModelSpec s;
    s.model = ModelKind::LMG;
    s.n_spins = n;
    s.chi = chi;
    s.omega = omega;
    return s;
}

// Squeezed-vacuum number distribution P_{2n} = sech r tanh^{2n} r (2n)! / (4^n n!^2).
std::vector<double> squeezed_populations(double omega_over_chi, int terms) {
    const double r = 0.5 * std::atanh(1.0 / (2.0 * omega_over_chi - 1.0));
    const double t = std::tanh(r);
    std::vector<double> p(static_cast<std::size_t>(2 * terms), 0.0);
    double c2 = 1.0 / std::cosh(r);  // |c_0|^2
    for (int n = 0; n < terms; ++n) {
        p[static_cast<std::size_t>(2 * n)] = c2;
        c2 *= t * t * (2.0 * n + 1.0) * (2.0 * n + 2.0) / (4.0 * (n + 1.0) * (n + 1.0));
    }
    return p;
}

double squeezed_intensity(int m, double omega_over_chi) {
    const auto p = squeezed_populations(omega_over_chi, 4000);
    double acc = 0.0;
    for (std::size_t n = 0; n + static_cast<std::size_t>(m) < p.size(); ++n) acc += p[n] * p[n + static_cast<std::size_t>(m)];
    return acc;
}

}  // namespace

TEST_SUITE("lmg") {

TEST_CASE("matrix elements for N = 2") {
    const auto a = lmg::build_lmg(lmg_spec(2, 1.0, 0.0));
    CHECK(a.diagonal == std::vector<double>{-0.5, 0.0, -0.5});
    for (double e : a.off_diagonal) CHECK(e == 0.0);
    const auto b = lmg::build_lmg(lmg_spec(2, 0.0, 1.0));
    for (double d : b.diagonal) CHECK(d == 0.0);
    for (double e : b.off_diagonal) CHECK(e == doctest::Approx(-std::sqrt(2.0) / 2.0));
}

TEST_CASE("dense matrix equals the ladder-operator oracle") {
    const auto h = lmg::build_lmg(lmg_spec(9, 1.3, 0.7));
    const auto o = oracle::collective(9, 1.3, 0.7);
    CHECK((h.dense() - o.h).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((h.dense() - h.dense().transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ground state energy and FOTOC against dense oracle") {
    for (double omega : {0.3, 0.9, 1.4, 3.0}) {
        const auto spec = lmg_spec(30, 1.0, omega);
        const auto gs = lmg::lmg_ground_state(lmg::build_lmg(spec));
        const auto o = oracle::collective(30, 1.0, omega);
        // Near-degenerate ferromagnetic pair: keep the m_z -> -m_z even combination.
        const Eigen::MatrixXd evecs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(o.h).eigenvectors();
        Eigen::VectorXd ref = evecs.col(0) + evecs.col(0).reverse();
        if (ref.norm() < 0.5) ref = evecs.col(1) + evecs.col(1).reverse();
        ref.normalize();
        CHECK(std::abs(gs.amplitudes().real().dot(ref)) == doctest::Approx(1.0).epsilon(1e-10));
        const oracle::Fotoc fotoc(o.sx);
        for (double phi : {0.0, 0.4, 1.3, 2.9}) CHECK(lmg::fotoc_of_state(gs, phi) == doctest::Approx(fotoc(ref, phi)).epsilon(1e-10));
    }
}

TEST_CASE("strong field: x-polarized ground state") {
    const auto gs = lmg::lmg_ground_state(lmg::build_lmg(lmg_spec(10, 1.0, 1e6)));
    const auto sx = lmg::SxEigenbasis::cached(10);
    CHECK(overlap_fidelity(gs, sx->polarized_x()) == doctest::Approx(1.0).epsilon(1e-6));
    const auto big = lmg::lmg_ground_state(lmg::build_lmg(lmg_spec(50, 1.0, 10.0)));
    const auto o = oracle::collective(50, 1.0, 10.0);
    const Eigen::VectorXd v = big.amplitudes().real();
    CHECK(v.dot(o.sx * v) / 25.0 > 0.99);
}

TEST_CASE("zero field: GHZ-like ground state with |S_z| = N/2") {
    const auto gs = lmg::lmg_ground_state(lmg::build_lmg(lmg_spec(10, 1.0, 0.0)));
    CHECK(lattice::order_parameter_abs_sz(gs).raw == doctest::Approx(5.0));
}

TEST_CASE("ground-state spectrum: odd orders vanish, sum rule, real x-basis amplitudes") {
    const auto gs = lmg::lmg_ground_state(lmg::build_lmg(lmg_spec(40, 1.0, 0.8)));
    const auto s = lmg::mqc_of_state(gs);
    CHECK_FALSE(s.check_invariants().has_value());
    for (int m = 1; m <= 40; m += 2) CHECK(std::abs(s.at(m)) < 1e-12);
    const auto x = lmg::SxEigenbasis::cached(40)->to_x_basis(gs.amplitudes());
    CHECK(x.imag().cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("spectrum equals DFT of the FOTOC") {
    const auto gs = lmg::lmg_ground_state(lmg::build_lmg(lmg_spec(12, 1.0, 0.6)));
    const int k = default_phi_points(12);
    std::vector<double> f;
    for (double phi : oracle::phi_grid(k)) f.push_back(lmg::fotoc_of_state(gs, phi));
    const auto s = lmg::mqc_of_state(gs);
    for (int m = -12; m <= 12; ++m) CHECK(std::abs(s.at(m) - oracle::dft(f, m)) < 1e-13);
}

TEST_CASE("S_x rotation is exact") {
    const auto sx = lmg::SxEigenbasis::cached(8);
    const auto o = oracle::collective(8, 0.0, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(o.sx);
    Eigen::VectorXcd v(9);
    for (int i = 0; i < 9; ++i) v[i] = Complex(std::cos(i), std::sin(0.3 * i));
    v.normalize();
    const double phi = 0.77;
    Eigen::VectorXcd phases(9);
    for (int i = 0; i < 9; ++i) phases[i] = std::exp(Complex(0.0, -phi * es.eigenvalues()[i]));
    const Eigen::VectorXcd ref = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().transpose() * v;
    CHECK((sx->rotate(v, phi) - ref).norm() < 1e-13);
    const auto cols = sx->rotate_columns(v, {0.0, phi});
    CHECK((cols.col(0) - v).norm() < 1e-13);
    CHECK((cols.col(1) - ref).norm() < 1e-13);
}

TEST_CASE("HP intensity limits and squeezed-vacuum oracle") {
    CHECK(lmg::hp_intensity(0, 1e8) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(lmg::hp_intensity(2, 1e8) < 1e-12);
    CHECK(lmg::hp_intensity(1, 2.0) == 0.0);
    CHECK(lmg::hp_intensity(0, 1.25) == doctest::Approx(0.8587).epsilon(1e-3));
    for (double w : {1.1, 1.25, 2.0}) {
        for (int m : {0, 2, 4, 10}) CHECK(lmg::hp_intensity(m, w) == doctest::Approx(squeezed_intensity(m, w)).epsilon(1e-10));
    }
    CHECK(lmg::hp_intensity(-4, 1.5) == lmg::hp_intensity(4, 1.5));
    CHECK_THROWS(lmg::hp_intensity(0, 0.9));
}

TEST_CASE("near-critical expansion") {
    const double r4 = lmg::hp_intensity(0, 1 + 1e-4) / lmg::hp_intensity_near_critical(0, 1 + 1e-4);
    const double r6 = lmg::hp_intensity(0, 1 + 1e-6) / lmg::hp_intensity_near_critical(0, 1 + 1e-6);
    CHECK(std::abs(r6 - 1.0) < std::abs(r4 - 1.0));
    CHECK(std::abs(r6 - 1.0) < 0.05);
    const double v = lmg::hp_intensity_near_critical(0, 1 + 1e-4);
    CHECK(v > 0.0);
    // H_{-1/2} = -2 ln 2, so the m = 0 expansion is (2/pi) sqrt(eps) (2 ln 2 - ln eps), about 0.0675 here.
    CHECK(v == doctest::Approx(2.0 / std::numbers::pi * 1e-2 * (2 * std::log(2.0) - std::log(1e-4))));
    CHECK(lmg::hp_intensity_near_critical(0, 1 + 1e-12) < 1e-4);
}

TEST_CASE("second-derivative asymptote") {
    CHECK(lmg::hp_second_derivative_asymptote(0, 1 + 1e-4) < 0.0);
    const double e = 1e-5;
    const double a = lmg::hp_second_derivative_asymptote(0, 1 + e);
    const double b = lmg::hp_second_derivative_asymptote(0, 1 + e / 2);
    const double expected = std::pow(2.0, 1.5) * (std::log(e / 2) - std::log(4.0)) / (std::log(e) - std::log(4.0));
    CHECK(b / a == doctest::Approx(expected).epsilon(0.02));
    // Finite differences of the full HP intensity.
    const double w = 1 + 1e-3, h = 1e-5;
    const double fd = (lmg::hp_intensity(0, w + h) - 2 * lmg::hp_intensity(0, w) + lmg::hp_intensity(0, w - h)) / (h * h);
    CHECK(lmg::hp_second_derivative_asymptote(0, w) == doctest::Approx(fd).epsilon(0.2));
}

TEST_CASE("GHZ intensities") {
    CHECK(lmg::ghz_intensity(4, 0) == doctest::Approx(0.59375));
    for (int n : {4, 8, 12}) {
        double sum = 0.0;
        for (int m = -n; m <= n; ++m) sum += lmg::ghz_intensity(n, m);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(lmg::ghz_intensity(400, 0) == doctest::Approx(2.0 / std::sqrt(std::numbers::pi * 400)).epsilon(0.01));
}

TEST_CASE("GHZ intensities match a brute-force rotation for N divisible by 4") {
    for (int n : {4, 8}) {
        const auto chain = oracle::chain(n, 0.0, 0.0);
        Eigen::VectorXd ghz = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
        ghz[0] = ghz[ghz.size() - 1] = 1.0 / std::sqrt(2.0);
        const oracle::Fotoc fotoc(chain.sx);
        std::vector<double> f;
        for (double phi : oracle::phi_grid(2 * n + 2)) f.push_back(fotoc(ghz, phi));
        for (int m = 0; m <= n; ++m) CHECK(oracle::dft(f, m).real() == doctest::Approx(lmg::ghz_intensity(n, m)).epsilon(1e-12));
    }
}

TEST_CASE("HP sum rule over even orders") {
    for (double w : {1.1, 1.5, 3.0, 10.0}) {
        double sum = lmg::hp_intensity(0, w);
        for (int m = 2;; m += 2) {
            const double v = lmg::hp_intensity(m, w);
            sum += 2.0 * v;
            if (v < 1e-14) break;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
    }
}

}
