#include "mqc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mqc {

SpinBasis SpinBasis::dicke(int n_spins) {
    if (n_spins < 1) throw std::invalid_argument("Dicke basis needs at least one spin");
    return {BasisKind::DickeZ, n_spins};
}

SpinBasis SpinBasis::bitstring(int n_spins) {
    if (n_spins < 1 || n_spins > 62) throw std::invalid_argument("bitstring basis needs 1 <= N <= 62");
    return {BasisKind::Bitstring, n_spins};
}

std::size_t SpinBasis::dimension() const {
    if (kind == BasisKind::DickeZ) return static_cast<std::size_t>(n_spins) + 1;
    return std::size_t{1} << n_spins;
}

double SpinBasis::dicke_mz(std::size_t index) const {
    return static_cast<double>(index) - 0.5 * n_spins;
}

std::string to_string(const SpinBasis& basis) {
    std::ostringstream os;
    os << (basis.kind == BasisKind::DickeZ ? "DickeZ" : "Bitstring") << "(N=" << basis.n_spins << ")";
    return os.str();
}

StateVector::StateVector(SpinBasis basis, Eigen::VectorXcd amplitudes)
    : basis_(basis), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != basis_.dimension()) {
        throw std::invalid_argument("amplitude count does not match " + to_string(basis_));
    }
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > tol::kStateNorm) {
        throw std::invalid_argument("state is not normalized: |psi| = " + std::to_string(norm));
    }
}

StateVector StateVector::normalized(SpinBasis basis, Eigen::VectorXcd amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    amplitudes /= norm;
    return StateVector(basis, std::move(amplitudes));
}

StateVector StateVector::basis_state(SpinBasis basis, std::size_t index) {
    if (index >= basis.dimension()) throw std::out_of_range("basis index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension()));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return StateVector(basis, std::move(v));
}

StateVector StateVector::phase_fixed() const {
    Eigen::Index imax = 0;
    amplitudes_.cwiseAbs2().maxCoeff(&imax);
    const Complex a = amplitudes_[imax];
    if (std::abs(a) == 0.0) return *this;
    const Complex phase = std::conj(a) / std::abs(a);
    Eigen::VectorXcd v = amplitudes_ * phase;
    v[imax] = Complex(std::abs(a), 0.0);
    return StateVector(basis_, std::move(v));
}

double StateVector::max_imag() const {
    return amplitudes_.size() == 0 ? 0.0 : amplitudes_.imag().cwiseAbs().maxCoeff();
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    if (!(a.basis() == b.basis())) {
        throw std::invalid_argument("basis mismatch: " + to_string(a.basis()) + " vs " + to_string(b.basis()));
    }
    return a.amplitudes().dot(b.amplitudes());
}

double overlap_fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::LMG: return "LMG";
        case ModelKind::TFI: return "TFI";
        case ModelKind::ANNNI: return "ANNNI";
        case ModelKind::RFTI: return "RFTI";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    std::string upper = name;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "LMG") return ModelKind::LMG;
    if (upper == "TFI") return ModelKind::TFI;
    if (upper == "ANNNI") return ModelKind::ANNNI;
    if (upper == "RFTI") return ModelKind::RFTI;
    throw std::invalid_argument("unknown model '" + name + "' (expected LMG, TFI, ANNNI or RFTI)");
}

std::vector<double> ModelSpec::effective_fields() const {
    if (model != ModelKind::RFTI || disorder_fields.empty()) return std::vector<double>(static_cast<std::size_t>(n_spins), 0.0);
    return disorder_fields;
}

bool ModelSpec::has_flip_symmetry() const {
    const auto fields = effective_fields();
    return std::all_of(fields.begin(), fields.end(), [](double d) { return d == 0.0; });
}

ModelSpec ModelSpec::with_omega(double new_omega) const {
    ModelSpec copy = *this;
    copy.omega = new_omega;
    return copy;
}

void ModelSpec::validate(int bitstring_cap) const {
    if (n_spins < 2) throw std::invalid_argument("model needs N >= 2, got " + std::to_string(n_spins));
    if (is_bitstring() && n_spins > bitstring_cap) {
        throw std::invalid_argument("N = " + std::to_string(n_spins) + " exceeds the bitstring cap " + std::to_string(bitstring_cap));
    }
    if (model == ModelKind::RFTI && !disorder_fields.empty() && disorder_fields.size() != static_cast<std::size_t>(n_spins)) {
        throw std::invalid_argument("disorder_fields must have length N");
    }
    if (!std::isfinite(chi) || !std::isfinite(omega) || !std::isfinite(gamma)) {
        throw std::invalid_argument("model couplings must be finite");
    }
    if (disorder_sigma < 0.0) throw std::invalid_argument("disorder_sigma must be >= 0");
}

std::string to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::TrueEcho: return "true-echo";
        case SpectrumKind::PseudoEcho: return "pseudo-echo";
        case SpectrumKind::Analytic: return "analytic";
    }
    return "?";
}

MqcSpectrum::MqcSpectrum(int m_max, std::vector<Complex> intensities, SpectrumKind kind)
    : m_max_(m_max), intensities_(std::move(intensities)), kind_(kind) {
    if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
    if (intensities_.size() != static_cast<std::size_t>(2 * m_max + 1)) {
        throw std::invalid_argument("spectrum needs 2*m_max+1 intensities");
    }
}

std::vector<int> MqcSpectrum::orders() const {
    std::vector<int> out;
    out.reserve(intensities_.size());
    for (int m = -m_max_; m <= m_max_; ++m) out.push_back(m);
    return out;
}

Complex MqcSpectrum::at(int m) const {
    if (m < -m_max_ || m > m_max_) return {0.0, 0.0};
    return intensities_[static_cast<std::size_t>(m + m_max_)];
}

Complex MqcSpectrum::sum() const {
    Complex s = 0.0;
    for (const auto& v : intensities_) s += v;
    return s;
}

std::optional<std::string> MqcSpectrum::check_invariants(double expected_sum) const {
    if (std::abs(sum() - Complex(expected_sum, 0.0)) > tol::kSpectrumSum) {
        std::ostringstream os;
        os << "sum rule violated: sum = " << sum() << ", expected " << expected_sum;
        return os.str();
    }
    if (kind_ == SpectrumKind::PseudoEcho) return std::nullopt;
    for (int m = -m_max_; m <= m_max_; ++m) {
        const Complex v = at(m);
        std::ostringstream os;
        if (std::abs(v.imag()) > tol::kSpectrum) {
            os << "I_" << m << " has imaginary part " << v.imag();
            return os.str();
        }
        if (v.real() < -tol::kSpectrum) {
            os << "I_" << m << " is negative: " << v.real();
            return os.str();
        }
        if (std::abs(v - at(-m)) > tol::kSpectrum) {
            os << "I_" << m << " != I_" << -m;
            return os.str();
        }
    }
    return std::nullopt;
}

bool FotocCurve::in_range() const {
    return std::all_of(values.begin(), values.end(), [](double v) {
        return v >= -tol::kFotocRange && v <= 1.0 + tol::kFotocRange;
    });
}

std::vector<double> uniform_phi_grid(int points) {
    if (points < 1) throw std::invalid_argument("phi grid needs at least one point");
    std::vector<double> phis(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) phis[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / points;
    return phis;
}

}  // namespace mqc
