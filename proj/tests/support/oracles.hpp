#pragma once

// Independent reference implementations for tests. Nothing here calls the library
// solvers: chains are built from Kronecker products of Pauli matrices, the Dicke
// spin matrices from the textbook ladder formulas, and transforms by direct sums.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Single-site operator on site `site` of an n-site chain (site 0 leftmost factor).
inline MatrixXd site_op(const MatrixXd& op, int site, int n) {
    MatrixXd out = MatrixXd::Identity(1, 1);
    for (int s = 0; s < n; ++s) out = kron(out, s == site ? op : MatrixXd::Identity(2, 2));
    return out;
}

inline MatrixXd pauli_x() { return (MatrixXd(2, 2) << 0, 1, 1, 0).finished(); }
inline MatrixXd pauli_z() { return (MatrixXd(2, 2) << 1, 0, 0, -1).finished(); }

struct Chain {
    MatrixXd h;
    MatrixXd sx;  // (1/2) sum sigma^x
};

/// -(chi/2) sum z_i z_{i+1} - (gamma/2) sum z_i z_{i+2} - sum d_i z_i - (omega/2) sum x_i, periodic.
inline Chain chain(int n, double chi, double omega, double gamma = 0.0, const std::vector<double>& fields = {}) {
    const auto dim = Eigen::Index{1} << n;
    Chain c{MatrixXd::Zero(dim, dim), MatrixXd::Zero(dim, dim)};
    std::vector<MatrixXd> z, x;
    for (int s = 0; s < n; ++s) {
        z.push_back(site_op(pauli_z(), s, n));
        x.push_back(site_op(pauli_x(), s, n));
    }
    for (int s = 0; s < n; ++s) {
        c.h -= 0.5 * chi * z[s] * z[(s + 1) % n];
        if (gamma != 0.0) c.h -= 0.5 * gamma * z[s] * z[(s + 2) % n];
        if (!fields.empty()) c.h -= fields[static_cast<std::size_t>(s)] * z[s];
        c.h -= 0.5 * omega * x[s];
        c.sx += 0.5 * x[s];
    }
    return c;
}

struct Collective {
    MatrixXd h;
    MatrixXd sx;
    MatrixXd sz;
};

/// -(chi/N) S_z^2 - omega S_x on the spin-N/2 multiplet, basis m = -S..S.
inline Collective collective(int n, double chi, double omega) {
    const double s = 0.5 * n;
    const Eigen::Index d = n + 1;
    Collective c{MatrixXd::Zero(d, d), MatrixXd::Zero(d, d), MatrixXd::Zero(d, d)};
    for (Eigen::Index i = 0; i < d; ++i) {
        const double m = -s + static_cast<double>(i);
        c.sz(i, i) = m;
        if (i + 1 < d) {
            // <m+1|S_+|m> = sqrt(s(s+1) - m(m+1)); S_x = (S_+ + S_-)/2.
            const double up = std::sqrt(s * (s + 1) - m * (m + 1));
            c.sx(i + 1, i) = c.sx(i, i + 1) = 0.5 * up;
        }
    }
    c.h = -(chi / n) * c.sz * c.sz - omega * c.sx;
    return c;
}

inline VectorXd ground_vector(const MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    return es.eigenvectors().col(0);
}

inline double ground_energy(const MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

/// |<psi| exp(-i phi S) |psi>|^2 via the eigendecomposition of S.
class Fotoc {
public:
    explicit Fotoc(const MatrixXd& s) : es_(s) {}
    double operator()(const VectorXd& psi, double phi) const {
        const VectorXd c = es_.eigenvectors().transpose() * psi;
        Complex acc = 0.0;
        for (Eigen::Index k = 0; k < c.size(); ++k) acc += c[k] * c[k] * std::exp(Complex(0.0, -phi * es_.eigenvalues()[k]));
        return std::norm(acc);
    }

private:
    Eigen::SelfAdjointEigenSolver<MatrixXd> es_;
};

/// (1/K) sum_j f_j exp(i m 2 pi j / K).
inline Complex dft(const std::vector<double>& f, int m) {
    const auto k = static_cast<int>(f.size());
    Complex acc = 0.0;
    for (int j = 0; j < k; ++j) acc += f[static_cast<std::size_t>(j)] * std::exp(Complex(0.0, 2.0 * std::numbers::pi * m * j / k));
    return acc / static_cast<double>(k);
}

inline std::vector<double> phi_grid(int k) {
    std::vector<double> p(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) p[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / k;
    return p;
}

/// Binomial coefficient as a double by the multiplicative formula.
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace oracle
