#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mqc/lanczos.hpp"
#include "mqc/lattice.hpp"
#include "mqc/tfi_analytic.hpp"
#include "oracles.hpp"

using namespace mqc;
using std::numbers::pi;

namespace {

ModelSpec chain_spec(ModelKind kind, int n, double omega, double gamma = 0.0) {
    ModelSpec s;
    s.model = kind;
    s.n_spins = n;
    s.chi = 1.0;
    s.omega = omega;
    s.gamma = gamma;
    return s;
}

Eigen::VectorXcd random_vector(Eigen::Index dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd v(dim);
    for (auto& x : v) x = Complex(nd(rng), nd(rng));
    return v.normalized();
}

// Library: site 0 is the LSB and a set bit is sigma^z = +1. Oracle: site 0 is the
// leftmost Kronecker factor and local index 0 is sigma^z = +1. So reverse and complement.
Eigen::VectorXd to_oracle_order(const Eigen::VectorXd& v, int n) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index b = 0; b < v.size(); ++b) {
        Eigen::Index r = 0;
        for (int s = 0; s < n; ++s) if (!((b >> s) & 1)) r |= Eigen::Index{1} << (n - 1 - s);
        out[r] = v[b];
    }
    return out;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("apply: diagonal and pure-field cases") {
    const lattice::SparseSpinHamiltonian h0(chain_spec(ModelKind::TFI, 6, 0.0));
    for (std::size_t b : {0u, 5u, 63u}) {
        const auto out = lattice::apply_hamiltonian(h0, StateVector::basis_state(h0.basis(), b));
        CHECK(out[static_cast<Eigen::Index>(b)].real() == doctest::Approx(h0.diagonal()[static_cast<Eigen::Index>(b)]));
        CHECK(out.norm() == doctest::Approx(std::abs(h0.diagonal()[static_cast<Eigen::Index>(b)])));
    }
    // Fully aligned chain: -(chi/2) N.
    CHECK(h0.diagonal()[0] == doctest::Approx(-3.0));
    ModelSpec field = chain_spec(ModelKind::TFI, 6, 1.4);
    field.chi = 0.0;
    const lattice::SparseSpinHamiltonian hx(field);
    const auto out = lattice::apply_hamiltonian(hx, StateVector::basis_state(hx.basis(), 0));
    int nonzero = 0;
    for (Eigen::Index b = 0; b < out.size(); ++b) {
        if (std::abs(out[b]) > 0) {
            ++nonzero;
            CHECK(std::popcount(static_cast<unsigned>(b)) == 1);
            CHECK(out[b].real() == doctest::Approx(-0.7));
        }
    }
    CHECK(nonzero == 6);
}

TEST_CASE("matrix-free operator equals the Kronecker oracle") {
    const std::vector<double> fields{0.3, -0.1, 0.25, 0.0, -0.4, 0.2, 0.05};
    ModelSpec rfti = chain_spec(ModelKind::RFTI, 7, 0.9);
    rfti.disorder_fields = fields;
    ModelSpec annni = chain_spec(ModelKind::ANNNI, 7, 0.9, -0.35);
    for (const auto& [spec, oracle_chain] :
         {std::pair{rfti, oracle::chain(7, 1.0, 0.9, 0.0, fields)}, std::pair{annni, oracle::chain(7, 1.0, 0.9, -0.35)}}) {
        const lattice::SparseSpinHamiltonian h(spec);
        const Eigen::MatrixXd dense = h.dense();
        CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
        // Same spectrum (the oracle orders sites the other way round).
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(dense, Eigen::EigenvaluesOnly), b(oracle_chain.h, Eigen::EigenvaluesOnly);
        CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
        // And the same matrix after reversing the bit order.
        Eigen::MatrixXd permuted(dense.rows(), dense.cols());
        for (Eigen::Index c = 0; c < dense.cols(); ++c) permuted.col(c) = to_oracle_order(dense.col(c), 7);
        Eigen::MatrixXd both(dense.rows(), dense.cols());
        for (Eigen::Index r = 0; r < dense.rows(); ++r) both.row(r) = to_oracle_order(permuted.row(r).transpose(), 7).transpose();
        CHECK((both - oracle_chain.h).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("Hermiticity on a random vector") {
    const lattice::SparseSpinHamiltonian h(chain_spec(ModelKind::TFI, 10, 0.8));
    const auto v = StateVector(h.basis(), random_vector(1 << 10, 3));
    const Eigen::VectorXcd hv = lattice::apply_hamiltonian(h, v);
    CHECK(std::abs(v.amplitudes().dot(hv).imag()) < 1e-12);
}

TEST_CASE("Lanczos against dense diagonalization") {
    const lattice::SparseSpinHamiltonian h(chain_spec(ModelKind::TFI, 8, 0.5));
    const auto gs = lanczos_ground_state(h);
    CHECK(gs.energy == doctest::Approx(oracle::ground_energy(oracle::chain(8, 1.0, 0.5).h)).epsilon(1e-12));
    CHECK(gs.residual < 1e-10);
    CHECK(gs.state.max_imag() < 1e-9);

    const lattice::SparseSpinHamiltonian strong(chain_spec(ModelKind::TFI, 8, 10.0));
    const auto plus = StateVector::normalized(strong.basis(), Eigen::VectorXcd::Ones(256));
    // Infidelity to the x-polarized product state is about N / (16 g^2): 0.005 at g = 10.
    const double fid = overlap_fidelity(lanczos_ground_state(strong).state, plus);
    CHECK(fid > 0.99);
    CHECK(fid == doctest::Approx(std::pow(oracle::ground_vector(oracle::chain(8, 1.0, 10.0).h).sum(), 2) / 256).epsilon(1e-10));
    const lattice::SparseSpinHamiltonian stronger(chain_spec(ModelKind::TFI, 8, 30.0));
    CHECK(overlap_fidelity(lanczos_ground_state(stronger).state, plus) > 0.999);

    ModelSpec rfti = chain_spec(ModelKind::RFTI, 9, 0.7);
    rfti.disorder_fields = lattice::draw_disorder(11, 0.5, 9).fields;
    const lattice::SparseSpinHamiltonian hr(rfti);
    CHECK(lanczos_ground_state(hr).energy == doctest::Approx(oracle::ground_energy(hr.dense())).epsilon(1e-12));
}

TEST_CASE("ANNNI with gamma = 0 equals TFI") {
    const auto e_tfi = lanczos_ground_state(lattice::SparseSpinHamiltonian(chain_spec(ModelKind::TFI, 10, 0.9))).energy;
    const auto e_annni = lanczos_ground_state(lattice::SparseSpinHamiltonian(chain_spec(ModelKind::ANNNI, 10, 0.9, 0.0))).energy;
    CHECK(std::abs(e_tfi - e_annni) < 1e-12);
}

TEST_CASE("symmetric sector reproduces the full-space ground state") {
    for (double gamma : {0.0, -0.3, 0.4}) {
        const lattice::SparseSpinHamiltonian h(chain_spec(ModelKind::ANNNI, 10, 0.8, gamma));
        CHECK(lattice::has_symmetric_sector(h.spec()));
        LanczosOptions sym, full;
        sym.sector = SectorFilter::Symmetric;
        sym.tol = full.tol = 1e-11;
        full.sector = SectorFilter::None;
        const auto a = lanczos_lowest(h, sym);
        const auto b = lanczos_lowest(h, full);
        CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-12));
        CHECK(std::abs(a.vector.dot(b.vector)) == doctest::Approx(1.0).epsilon(1e-9));
    }
    const auto sector = lattice::SymmetricSector::cached(8);
    Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(sector->dimension()), 1.0, 2.0);
    CHECK((sector->restrict(sector->expand(c)) - c).norm() < 1e-12);
    CHECK(sector->expand(c).norm() == doctest::Approx(c.norm()));
    ModelSpec rfti = chain_spec(ModelKind::RFTI, 8, 1.0);
    rfti.disorder_fields = lattice::draw_disorder(1, 0.3, 8).fields;
    CHECK_FALSE(lattice::has_symmetric_sector(rfti));
    CHECK_FALSE(lattice::has_symmetric_sector(chain_spec(ModelKind::TFI, 9, 1.0)));
}

TEST_CASE("global x rotation") {
    const auto v = StateVector(SpinBasis::bitstring(6), random_vector(64, 9));
    CHECK((lattice::apply_global_x_rotation(v, 0.0).amplitudes() - v.amplitudes()).norm() < 1e-14);
    CHECK((lattice::apply_global_x_rotation(v, 2 * pi).amplitudes() - v.amplitudes()).norm() < 1e-12);
    CHECK(lattice::apply_global_x_rotation(v, 1.234).amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
    // Dense oracle: exp(-i phi S_x) from the eigendecomposition of S_x.
    const auto c = oracle::chain(6, 0.0, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.sx);
    Eigen::VectorXcd ph(64);
    for (int i = 0; i < 64; ++i) ph[i] = std::exp(Complex(0.0, -0.9 * es.eigenvalues()[i]));
    const Eigen::MatrixXcd u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().transpose();
    // S_x is symmetric under site reversal, so bit order does not matter here.
    CHECK((lattice::rotate_x(v.amplitudes(), 6, 0.9) - u * v.amplitudes()).norm() < 1e-12);
}

TEST_CASE("FOTOC of lattice ground states") {
    const lattice::SparseSpinHamiltonian h(chain_spec(ModelKind::TFI, 8, 0.7));
    const auto gs = lanczos_ground_state(h, 5000, 1e-12).state;
    CHECK(lattice::fotoc_of_state(gs, 0.0) == doctest::Approx(1.0));
    CHECK(std::abs(lattice::fotoc_of_state(gs, 1.1) - tfi::fotoc_product(0.7, 1.1, 8)) < 1e-10);
    for (double phi : {0.3, 2.2}) CHECK(std::abs(lattice::fotoc_of_state(gs, phi) - lattice::fotoc_of_state(gs, 2 * pi - phi)) < 1e-10);
    const auto para = lanczos_ground_state(lattice::SparseSpinHamiltonian(chain_spec(ModelKind::TFI, 8, 1000.0))).state;
    for (double phi : {0.5, 1.5, 3.0}) CHECK(lattice::fotoc_of_state(para, phi) > 0.999);
}

TEST_CASE("ED FOTOC equals the product form over a grid") {
    for (int n : {4, 8, 12}) {
        for (double g : {0.4, 0.8, 1.0, 1.25, 2.0}) {
            const auto gs = lanczos_ground_state(lattice::SparseSpinHamiltonian(chain_spec(ModelKind::TFI, n, g)), 5000, 1e-12).state;
            for (double phi : {0.35, 1.2, 2.0, 2.9}) CHECK(std::abs(lattice::fotoc_of_state(gs, phi) - tfi::fotoc_product(g, phi, n)) < 1e-9);
        }
    }
}

TEST_CASE("spectrum of a ground state") {
    ModelSpec spec = chain_spec(ModelKind::ANNNI, 10, 0.6, 0.25);
    const auto gs = lanczos_ground_state(lattice::SparseSpinHamiltonian(spec), 5000, 1e-12).state;
    const auto s = lattice::mqc_of_state(gs);
    CHECK_FALSE(s.check_invariants().has_value());
    for (int m = 1; m <= 10; m += 2) CHECK(std::abs(s.at(m)) < 1e-10);
    const auto p = lattice::sx_distribution(gs);
    double total = 0.0;
    for (double x : p) total += x;
    CHECK(total == doctest::Approx(1.0));
    std::vector<double> f;
    for (double phi : oracle::phi_grid(22)) f.push_back(lattice::fotoc_of_state(gs, phi));
    for (int m = 0; m <= 10; ++m) CHECK(std::abs(s.at(m) - oracle::dft(f, m)) < 1e-12);
}

TEST_CASE("order parameter") {
    const auto up = StateVector::basis_state(SpinBasis::bitstring(6), 63);
    CHECK(lattice::order_parameter_abs_sz(up).raw == doctest::Approx(3.0));
    CHECK(lattice::order_parameter_abs_sz(up).normalized == doctest::Approx(1.0));
    const auto flat = StateVector::normalized(SpinBasis::bitstring(2), Eigen::VectorXcd::Ones(4));
    CHECK(lattice::order_parameter_abs_sz(flat).raw == doctest::Approx(0.5));
    const auto ferro = lanczos_ground_state(lattice::SparseSpinHamiltonian(chain_spec(ModelKind::TFI, 12, 0.1))).state;
    const auto para = lanczos_ground_state(lattice::SparseSpinHamiltonian(chain_spec(ModelKind::TFI, 12, 10.0))).state;
    CHECK(lattice::order_parameter_abs_sz(ferro).normalized > 0.95);
    CHECK(lattice::order_parameter_abs_sz(para).normalized < 0.3);
}

TEST_CASE("disorder draws") {
    const auto zero = lattice::draw_disorder(5, 0.0, 12);
    for (double d : zero.fields) CHECK(d == 0.0);
    CHECK(lattice::draw_disorder(42, 0.7, 16).fields == lattice::draw_disorder(42, 0.7, 16).fields);
    CHECK(lattice::draw_disorder(42, 0.7, 16).fields != lattice::draw_disorder(43, 0.7, 16).fields);
    const auto big = lattice::draw_disorder(2024, 1.0, 100000);
    double mean = 0.0, var = 0.0;
    for (double d : big.fields) mean += d;
    mean /= 1e5;
    for (double d : big.fields) var += (d - mean) * (d - mean);
    CHECK(std::abs(mean) < 4.0 / std::sqrt(1e5));
    CHECK(var / 1e5 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(lattice::realization_seed(7, 0) != lattice::realization_seed(7, 1));
    // An RFTI chain with zero disorder is the TFI chain.
    ModelSpec rfti = chain_spec(ModelKind::RFTI, 8, 0.9);
    rfti.disorder_fields = zero.fields;
    rfti.disorder_fields.resize(8);
    CHECK(lattice::SparseSpinHamiltonian(rfti).diagonal() == lattice::SparseSpinHamiltonian(chain_spec(ModelKind::TFI, 8, 0.9)).diagonal());
}

TEST_CASE("Lanczos reports non-convergence") {
    const lattice::SparseSpinHamiltonian h(chain_spec(ModelKind::TFI, 10, 1.0));
    LanczosOptions o;
    o.max_iter = 3;
    o.basis_size = 3;
    o.tol = 1e-14;
    CHECK_THROWS_AS(lanczos_lowest(h, o), ConvergenceError);
}

}
