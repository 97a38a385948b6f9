#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mqc/core.hpp"

using namespace mqc;

TEST_SUITE("core") {

TEST_CASE("basis dimensions and Dicke labels") {
    CHECK(SpinBasis::dicke(7).dimension() == 8);
    CHECK(SpinBasis::bitstring(7).dimension() == 128);
    const SpinBasis d = SpinBasis::dicke(4);
    CHECK(d.dicke_mz(0) == -2.0);
    CHECK(d.dicke_mz(2) == 0.0);
    CHECK(d.dicke_mz(4) == 2.0);
}

TEST_CASE("inner products of simple states") {
    const SpinBasis b = SpinBasis::bitstring(2);
    const auto e0 = StateVector::basis_state(b, 0);
    const auto e1 = StateVector::basis_state(b, 1);
    Eigen::VectorXcd plus = Eigen::VectorXcd::Zero(4);
    plus[0] = plus[1] = 1.0;
    const auto s = StateVector::normalized(b, plus);
    CHECK(std::abs(inner_product(e0, e0) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(inner_product(e0, e1)) < 1e-15);
    CHECK(std::abs(inner_product(s, e0) - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(overlap_fidelity(e0, e0) == doctest::Approx(1.0));
    CHECK(overlap_fidelity(e0, e1) == doctest::Approx(0.0));
    CHECK(overlap_fidelity(s, e0) == doctest::Approx(0.5));
}

TEST_CASE("inner product symmetry and phase invariance") {
    const SpinBasis b = SpinBasis::dicke(5);
    Eigen::VectorXcd x(6), y(6);
    for (int i = 0; i < 6; ++i) {
        x[i] = Complex(std::sin(1.0 + i), std::cos(2.0 * i));
        y[i] = Complex(0.3 * i - 1.0, std::sin(0.7 * i));
    }
    const auto a = StateVector::normalized(b, x);
    const auto c = StateVector::normalized(b, y);
    CHECK(std::abs(inner_product(a, c) - std::conj(inner_product(c, a))) < 1e-15);
    const auto rotated = StateVector::normalized(b, x * std::exp(Complex(0.0, 1.234)));
    CHECK(overlap_fidelity(a, c) == doctest::Approx(overlap_fidelity(c, a)).epsilon(1e-14));
    CHECK(overlap_fidelity(rotated, c) == doctest::Approx(overlap_fidelity(a, c)).epsilon(1e-14));
}

TEST_CASE("state construction enforces normalization") {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v[0] = 2.0;
    CHECK_THROWS(StateVector(SpinBasis::bitstring(2), v));
    CHECK_THROWS(StateVector::normalized(SpinBasis::bitstring(2), Eigen::VectorXcd::Zero(4)));
    CHECK_THROWS(StateVector(SpinBasis::bitstring(3), Eigen::VectorXcd::Ones(4) * 0.5));
    const auto s = StateVector::normalized(SpinBasis::bitstring(2), v);
    CHECK(std::abs(s.amplitudes().norm() - 1.0) < 1e-15);
}

TEST_CASE("phase fixing makes the largest amplitude real positive") {
    Eigen::VectorXcd v(3);
    v << Complex(0.1, 0.0), Complex(0.0, -0.9), Complex(0.2, 0.1);
    const auto s = StateVector::normalized(SpinBasis::dicke(2), v).phase_fixed();
    CHECK(s[1].real() > 0.0);
    CHECK(std::abs(s[1].imag()) < 1e-15);
}

TEST_CASE("model validation") {
    ModelSpec m;
    m.n_spins = 1;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.n_spins = 25;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.model = ModelKind::LMG;
    CHECK_NOTHROW(m.validate());
    m.model = ModelKind::RFTI;
    m.n_spins = 4;
    m.disorder_fields = {0.1, 0.2};
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    CHECK(parse_model_kind("annni") == ModelKind::ANNNI);
    CHECK_THROWS(parse_model_kind("XYZ"));
}

TEST_CASE("gamma and disorder only act on their own models") {
    ModelSpec m;
    m.model = ModelKind::TFI;
    m.n_spins = 4;
    m.gamma = 0.7;
    m.disorder_fields = {1, 2, 3, 4};
    CHECK(m.effective_gamma() == 0.0);
    for (double f : m.effective_fields()) CHECK(f == 0.0);
    CHECK(m.has_flip_symmetry());
    m.model = ModelKind::RFTI;
    CHECK(m.effective_fields()[2] == 3.0);
    CHECK_FALSE(m.has_flip_symmetry());
}

TEST_CASE("spectrum invariants") {
    const MqcSpectrum good(2, {0.125, 0.0, 0.75, 0.0, 0.125}, SpectrumKind::TrueEcho);
    CHECK_FALSE(good.check_invariants().has_value());
    CHECK(good.at(5) == Complex(0.0));
    CHECK(good.real_at(-2) == 0.125);
    const MqcSpectrum asym(1, {0.2, 0.5, 0.3}, SpectrumKind::TrueEcho);
    CHECK(asym.check_invariants().has_value());
    const MqcSpectrum negative(1, {-0.1, 1.2, -0.1}, SpectrumKind::Analytic);
    CHECK(negative.check_invariants().has_value());
    const MqcSpectrum bad_sum(1, {0.1, 0.7, 0.1}, SpectrumKind::TrueEcho);
    CHECK(bad_sum.check_invariants().has_value());
    CHECK_FALSE(bad_sum.check_invariants(0.9).has_value());
    // Pseudo-echo spectra may be complex and asymmetric.
    const MqcSpectrum pseudo(1, {Complex(0.1, 0.2), 0.6, Complex(0.3, -0.2)}, SpectrumKind::PseudoEcho);
    CHECK_FALSE(pseudo.check_invariants().has_value());
}

TEST_CASE("uniform phi grid") {
    const auto g = uniform_phi_grid(8);
    REQUIRE(g.size() == 8);
    CHECK(g[0] == 0.0);
    CHECK(g[4] == doctest::Approx(std::numbers::pi));
    CHECK(default_phi_points(20) == 42);
    FotocCurve c{g, std::vector<double>(8, 1.0 + 1e-13)};
    CHECK(c.in_range());
    c.values[3] = 1.001;
    CHECK_FALSE(c.in_range());
}

}
