#include "mqc/lattice.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mqc/parallel.hpp"

namespace mqc::lattice {

namespace {

constexpr std::size_t kParallelMin = std::size_t{1} << 15;

inline double spin(std::uint64_t b, int site) { return ((b >> site) & 1u) ? 1.0 : -1.0; }

template <class Vec>
void apply_impl(const Eigen::VectorXd& diag, int n, double omega, const Vec& in, Vec& out) {
    const auto dim = static_cast<std::size_t>(diag.size());
    if (static_cast<std::size_t>(in.size()) != dim) throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
    out.resize(in.size());
    const double hop = -0.5 * omega;
    parallel_chunks(dim, kParallelMin, [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b) {
            const auto i = static_cast<Eigen::Index>(b);
            typename Vec::Scalar acc = diag[i] * in[i];
            if (hop != 0.0) {
                typename Vec::Scalar flips = 0.0;
                for (int site = 0; site < n; ++site) flips += in[static_cast<Eigen::Index>(b ^ (std::uint64_t{1} << site))];
                acc += hop * flips;
            }
            out[i] = acc;
        }
    });
}

void walsh_hadamard(Eigen::VectorXcd& v) {
    const auto dim = v.size();
    for (Eigen::Index len = 1; len < dim; len <<= 1) {
        for (Eigen::Index i = 0; i < dim; i += 2 * len) {
            for (Eigen::Index j = i; j < i + len; ++j) {
                const Complex a = v[j];
                const Complex b = v[j + len];
                v[j] = a + b;
                v[j + len] = a - b;
            }
        }
    }
}

}  // namespace

std::uint64_t realization_seed(std::uint64_t base_seed, std::uint64_t index) {
    std::uint64_t z = base_seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

DisorderRealization draw_disorder(std::uint64_t seed, double sigma, int n_spins) {
    if (sigma < 0.0) throw std::invalid_argument("draw_disorder: sigma must be >= 0");
    if (n_spins < 0) throw std::invalid_argument("draw_disorder: negative N");
    DisorderRealization r{seed, sigma, std::vector<double>(static_cast<std::size_t>(n_spins), 0.0)};
    if (sigma == 0.0) return r;
    std::mt19937_64 engine(seed);
    auto uniform = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
    for (int i = 0; i < n_spins; i += 2) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        r.fields[static_cast<std::size_t>(i)] = sigma * radius * std::cos(2.0 * std::numbers::pi * u2);
        if (i + 1 < n_spins) r.fields[static_cast<std::size_t>(i + 1)] = sigma * radius * std::sin(2.0 * std::numbers::pi * u2);
    }
    return r;
}

SparseSpinHamiltonian::SparseSpinHamiltonian(const ModelSpec& spec, int bitstring_cap) : spec_(spec) {
    if (!spec.is_bitstring()) throw std::invalid_argument("SparseSpinHamiltonian needs a lattice model (TFI, ANNNI, RFTI)");
    spec.validate(bitstring_cap);
    const int n = spec.n_spins;
    const auto dim = std::size_t{1} << n;
    const double gamma = spec.effective_gamma();
    const auto fields = spec.effective_fields();
    auto diagonal = std::make_shared<Eigen::VectorXd>(static_cast<Eigen::Index>(dim));
    parallel_chunks(dim, kParallelMin, [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b) {
            double nn = 0.0, nnn = 0.0, longitudinal = 0.0;
            for (int i = 0; i < n; ++i) {
                const double si = spin(b, i);
                nn += si * spin(b, (i + 1) % n);
                if (gamma != 0.0) nnn += si * spin(b, (i + 2) % n);
                longitudinal += fields[static_cast<std::size_t>(i)] * si;
            }
            (*diagonal)[static_cast<Eigen::Index>(b)] = -0.5 * spec_.chi * nn - 0.5 * gamma * nnn - longitudinal;
        }
    });
    diagonal_ = std::move(diagonal);
}

void SparseSpinHamiltonian::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
    apply_impl(*diagonal_, spec_.n_spins, spec_.omega, in, out);
}

void SparseSpinHamiltonian::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    apply_impl(*diagonal_, spec_.n_spins, spec_.omega, in, out);
}

SparseSpinHamiltonian SparseSpinHamiltonian::with_omega(double omega) const {
    SparseSpinHamiltonian copy = *this;
    copy.spec_.omega = omega;
    return copy;
}

Eigen::MatrixXd SparseSpinHamiltonian::dense() const {
    if (spec_.n_spins > 14) throw std::invalid_argument("dense(): N too large");
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        m(b, b) = (*diagonal_)[b];
        for (int site = 0; site < spec_.n_spins; ++site) m(b ^ (Eigen::Index{1} << site), b) += -0.5 * spec_.omega;
    }
    return m;
}

SymmetricSector::SymmetricSector(int n_spins) : n_spins_(n_spins) {
    if (n_spins < 2 || n_spins > 30) throw std::invalid_argument("SymmetricSector needs 2 <= N <= 30");
    const std::uint64_t dim = std::uint64_t{1} << n_spins;
    const std::uint64_t mask = dim - 1;
    constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
    orbit_of_.assign(dim, unset);
    std::vector<std::uint64_t> members;
    for (std::uint64_t b = 0; b < dim; ++b) {
        if (orbit_of_[b] != unset) continue;
        // Ascending sweep: b is the smallest member of a new orbit.
        const auto index = static_cast<std::uint32_t>(representatives_.size());
        members.clear();
        std::uint64_t s = b;
        for (int shift = 0; shift < n_spins; ++shift) {
            for (std::uint64_t t : {s, ~s & mask}) {
                if (orbit_of_[t] == unset) {
                    orbit_of_[t] = index;
                    members.push_back(t);
                }
            }
            s = ((s << 1) | (s >> (n_spins - 1))) & mask;
        }
        representatives_.push_back(static_cast<std::uint32_t>(b));
        orbit_size_.push_back(static_cast<double>(members.size()));
    }
}

std::shared_ptr<const SymmetricSector> SymmetricSector::cached(int n_spins) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const SymmetricSector>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n_spins];
    if (!slot) slot = std::make_shared<const SymmetricSector>(n_spins);
    return slot;
}

Eigen::VectorXd SymmetricSector::restrict_diagonal(const Eigen::VectorXd& full_diagonal) const {
    Eigen::VectorXd d(static_cast<Eigen::Index>(dimension()));
    for (std::size_t r = 0; r < dimension(); ++r) d[static_cast<Eigen::Index>(r)] = full_diagonal[representatives_[r]];
    return d;
}

void SymmetricSector::apply(const Eigen::VectorXd& sector_diagonal, double omega, const Eigen::VectorXd& in,
                            Eigen::VectorXd& out) const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    if (in.size() != dim) throw std::invalid_argument("SymmetricSector::apply: dimension mismatch");
    out = sector_diagonal.cwiseProduct(in);
    const double hop = -0.5 * omega;
    if (hop == 0.0) return;
    // <R'|H|R> = hop * sqrt(|O_R| / |O_R'|) * #{i : flip_i(r) in O_R'}; scatter from each R.
    for (Eigen::Index r = 0; r < dim; ++r) {
        const std::uint64_t rep = representatives_[static_cast<std::size_t>(r)];
        const double scaled = hop * in[r] * std::sqrt(orbit_size_[static_cast<std::size_t>(r)]);
        for (int site = 0; site < n_spins_; ++site) {
            const std::uint32_t target = orbit_of_[rep ^ (std::uint64_t{1} << site)];
            out[target] += scaled / std::sqrt(orbit_size_[target]);
        }
    }
}

Eigen::VectorXd SymmetricSector::expand(const Eigen::VectorXd& coeffs) const {
    const std::size_t dim = orbit_of_.size();
    Eigen::VectorXd full(static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        const std::uint32_t r = orbit_of_[b];
        full[static_cast<Eigen::Index>(b)] = coeffs[r] / std::sqrt(orbit_size_[r]);
    }
    return full;
}

Eigen::VectorXd SymmetricSector::restrict(const Eigen::VectorXd& full) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
    for (std::size_t b = 0; b < orbit_of_.size(); ++b) c[orbit_of_[b]] += full[static_cast<Eigen::Index>(b)];
    for (std::size_t r = 0; r < dimension(); ++r) c[static_cast<Eigen::Index>(r)] /= std::sqrt(orbit_size_[r]);
    return c;
}

bool has_symmetric_sector(const ModelSpec& spec) {
    if (!spec.is_bitstring() || spec.n_spins % 2 != 0) return false;
    const auto fields = spec.effective_fields();
    return std::all_of(fields.begin(), fields.end(), [](double d) { return d == 0.0; });
}

Eigen::VectorXcd apply_hamiltonian(const SparseSpinHamiltonian& h, const StateVector& v) {
    if (!(v.basis() == h.basis())) throw std::invalid_argument("apply_hamiltonian: basis mismatch");
    Eigen::VectorXcd out;
    h.apply(v.amplitudes(), out);
    return out;
}

Eigen::VectorXcd rotate_x(const Eigen::VectorXcd& amplitudes, int n_spins, double phi) {
    const double c = std::cos(0.5 * phi);
    const Complex is(0.0, -std::sin(0.5 * phi));
    Eigen::VectorXcd v = amplitudes;
    const auto dim = static_cast<std::size_t>(v.size());
    for (int site = 0; site < n_spins; ++site) {
        const std::uint64_t bit = std::uint64_t{1} << site;
        parallel_chunks(dim, kParallelMin, [&](std::size_t begin, std::size_t end) {
            for (std::size_t b = begin; b < end; ++b) {
                if (b & bit) continue;
                const auto i0 = static_cast<Eigen::Index>(b);
                const auto i1 = static_cast<Eigen::Index>(b | bit);
                const Complex a0 = v[i0];
                const Complex a1 = v[i1];
                v[i0] = c * a0 + is * a1;
                v[i1] = is * a0 + c * a1;
            }
        });
    }
    return v;
}

StateVector apply_global_x_rotation(const StateVector& v, double phi) {
    if (v.basis().kind != BasisKind::Bitstring) throw std::invalid_argument("global x rotation needs a bitstring state");
    Eigen::VectorXcd out = rotate_x(v.amplitudes(), v.basis().n_spins, phi);
    out /= out.norm();
    return StateVector(v.basis(), std::move(out));
}

double fotoc_of_state(const StateVector& v, double phi) {
    if (v.basis().kind != BasisKind::Bitstring) throw std::invalid_argument("lattice::fotoc_of_state needs a bitstring state");
    return std::norm(v.amplitudes().dot(rotate_x(v.amplitudes(), v.basis().n_spins, phi)));
}

std::vector<double> sx_distribution(const StateVector& v) {
    if (v.basis().kind != BasisKind::Bitstring) throw std::invalid_argument("sx_distribution needs a bitstring state");
    const int n = v.basis().n_spins;
    Eigen::VectorXcd x = v.amplitudes();
    walsh_hadamard(x);
    // Index c holds the product state with sigma^x_i = +1 where bit i of c is clear.
    std::vector<double> p(static_cast<std::size_t>(n + 1), 0.0);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (Eigen::Index c = 0; c < x.size(); ++c) {
        p[static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(c)))] += std::norm(x[c]) * scale;
    }
    return p;
}

MqcSpectrum mqc_of_state(const StateVector& v) {
    const int n = v.basis().n_spins;
    const auto p = sx_distribution(v);
    std::vector<Complex> intensities(static_cast<std::size_t>(2 * n + 1));
    for (int m = -n; m <= n; ++m) {
        double acc = 0.0;
        for (int a = std::max(0, -m); a <= n && a + m <= n; ++a) acc += p[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(a + m)];
        intensities[static_cast<std::size_t>(m + n)] = acc;
    }
    return MqcSpectrum(n, std::move(intensities), SpectrumKind::TrueEcho);
}

OrderParameter order_parameter_abs_sz(const StateVector& v) {
    const int n = v.basis().n_spins;
    double acc = 0.0;
    if (v.basis().kind == BasisKind::Bitstring) {
        for (Eigen::Index b = 0; b < v.amplitudes().size(); ++b) {
            acc += std::norm(v.amplitudes()[b]) * std::abs(std::popcount(static_cast<std::uint64_t>(b)) - 0.5 * n);
        }
    } else {
        for (Eigen::Index i = 0; i < v.amplitudes().size(); ++i) {
            acc += std::norm(v.amplitudes()[i]) * std::abs(v.basis().dicke_mz(static_cast<std::size_t>(i)));
        }
    }
    return {acc, 2.0 * acc / n};
}

std::uint64_t state_bytes(int n_spins, int vectors) {
    return (std::uint64_t{1} << n_spins) * sizeof(Complex) * static_cast<std::uint64_t>(vectors);
}

}  // namespace mqc::lattice
