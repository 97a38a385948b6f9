#include "mqc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "mqc/analysis.hpp"
#include "mqc/lanczos.hpp"
#include "mqc/lattice.hpp"
#include "mqc/lmg.hpp"
#include "mqc/parallel.hpp"
#include "mqc/tfi_analytic.hpp"
#include "mqc/tridiagonal.hpp"

namespace mqc::dynamics {

namespace {

constexpr int kLaaTablePoints = 400;

void fill_midpoints(RampSchedule& s, const std::function<double(double)>& omega_at) {
    s.midpoint_omegas.resize(static_cast<std::size_t>(s.steps));
    for (int j = 0; j < s.steps; ++j) s.midpoint_omegas[static_cast<std::size_t>(j)] = omega_at((j + 0.5) * s.dt());
}

void check_ramp_args(double omega0, double omega_tau, double tau, int steps) {
    if (!(omega0 > omega_tau) || !(omega_tau > 0.0)) throw std::invalid_argument("ramp needs omega0 > omega_tau > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("ramp duration must be > 0");
    if (steps < 1) throw std::invalid_argument("ramp needs at least one step");
}

// Real orthogonal V applied to a complex block, without mixed-type products.
Eigen::MatrixXcd real_times(const Eigen::MatrixXd& v, const Eigen::MatrixXcd& x) {
    const Eigen::MatrixXd re = v * x.real();
    const Eigen::MatrixXd im = v * x.imag();
    Eigen::MatrixXcd out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

class LmgEvolver final : public Evolver {
public:
    explicit LmgEvolver(const ModelSpec& spec) : spec_(spec), sx_(lmg::SxEigenbasis::cached(spec.n_spins)) {}

    SpinBasis basis() const override { return SpinBasis::dicke(spec_.n_spins); }

    StateVector ground_state(double omega) const override {
        return lmg::lmg_ground_state(lmg::build_lmg(spec_.with_omega(omega)));
    }

    void step(Eigen::VectorXcd& v, double omega, double dt, int sign) const override {
        Eigen::MatrixXcd m = v;
        step_columns(m, omega, dt, sign);
        v = m.col(0);
    }

    void step_columns(Eigen::MatrixXcd& columns, double omega, double dt, int sign) const override {
        const lmg::LmgHamiltonian h = lmg::build_lmg(spec_.with_omega(omega));
        const TridiagonalEigen eig = tridiagonal_all(h.diagonal, h.off_diagonal);
        Eigen::MatrixXcd coeffs = real_times(eig.vectors.transpose(), columns);
        for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
            coeffs.row(i) *= std::exp(Complex(0.0, -sign * dt * eig.values[i]));
        }
        columns = real_times(eig.vectors, coeffs);
    }

    Eigen::VectorXcd rotate(const Eigen::VectorXcd& v, double phi) const override { return sx_->rotate(v, phi); }

private:
    ModelSpec spec_;
    std::shared_ptr<const lmg::SxEigenbasis> sx_;
};

class LatticeEvolver final : public Evolver {
public:
    LatticeEvolver(const ModelSpec& spec, const KrylovOptions& krylov) : h_(spec), krylov_(krylov) {}

    SpinBasis basis() const override { return h_.basis(); }

    StateVector ground_state(double omega) const override {
        return lanczos_ground_state(h_.with_omega(omega)).state;
    }

    void step(Eigen::VectorXcd& v, double omega, double dt, int sign) const override {
        const lattice::SparseSpinHamiltonian h = h_.with_omega(omega);
        krylov_propagate([&h](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { h.apply(in, out); }, v, dt, sign,
                         krylov_);
    }

    Eigen::VectorXcd rotate(const Eigen::VectorXcd& v, double phi) const override {
        return lattice::rotate_x(v, h_.n_spins(), phi);
    }

private:
    lattice::SparseSpinHamiltonian h_;
    KrylovOptions krylov_;
};

void run_steps(Eigen::MatrixXcd& columns, const Evolver& evolver, const RampSchedule& schedule, int sign,
               Direction direction) {
    const double dt = schedule.dt();
    for (int k = 0; k < schedule.steps; ++k) {
        const int j = direction == Direction::Forward ? k : schedule.steps - 1 - k;
        evolver.step_columns(columns, schedule.midpoint_omegas[static_cast<std::size_t>(j)], dt, sign);
    }
}

}  // namespace

int default_steps(double chi_tau) {
    return std::max(1000, static_cast<int>(std::ceil(40.0 * chi_tau)));
}

RampSchedule build_linear_schedule(double omega0, double omega_tau, double tau, int steps) {
    check_ramp_args(omega0, omega_tau, tau, steps);
    RampSchedule s;
    s.tau = tau;
    s.steps = steps;
    auto omega_at = [&](double t) { return omega0 + (omega_tau - omega0) * (t / tau); };
    for (int j = 0; j <= steps; ++j) {
        s.times.push_back(tau * j / steps);
        s.omegas.push_back(omega_at(s.times.back()));
    }
    s.times.back() = tau;
    s.omegas.front() = omega0;
    s.omegas.back() = omega_tau;
    fill_midpoints(s, omega_at);
    return s;
}

RampSchedule build_laa_schedule(double omega0, double omega_tau, double tau,
                                const std::function<double(double)>& gap, int steps) {
    check_ramp_args(omega0, omega_tau, tau, steps);
    // Log-spaced table and Simpson panels (end points plus midpoints).
    const int n = kLaaTablePoints;
    std::vector<double> grid(static_cast<std::size_t>(n));
    const double lo = std::log(omega_tau), hi = std::log(omega0);
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (n - 1));
    grid.front() = omega_tau;
    grid.back() = omega0;
    std::vector<double> nodes(static_cast<std::size_t>(2 * n - 1));
    for (int i = 0; i < n; ++i) nodes[static_cast<std::size_t>(2 * i)] = grid[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) {
        nodes[static_cast<std::size_t>(2 * i + 1)] = 0.5 * (grid[static_cast<std::size_t>(i)] + grid[static_cast<std::size_t>(i + 1)]);
    }
    std::vector<double> weight(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
        const double d = gap(nodes[i]);
        if (!(d > 0.0) || !std::isfinite(d)) throw std::runtime_error("LAA schedule: gap must be positive, got " + std::to_string(d) + " at omega = " + std::to_string(nodes[i]));
        weight[i] = 1.0 / (d * d);
    });
    // above[i] = int_{grid[i]}^{omega0} dOmega / Delta^2.
    std::vector<double> above(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 2; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(2 * i);
        const double h = grid[static_cast<std::size_t>(i + 1)] - grid[static_cast<std::size_t>(i)];
        above[static_cast<std::size_t>(i)] = above[static_cast<std::size_t>(i + 1)] + h / 6.0 * (weight[k] + 4.0 * weight[k + 1] + weight[k + 2]);
    }
    const double gamma = tau / above.front();

    // Table of (t, Omega) with ascending t.
    std::vector<double> t_table, omega_table;
    for (int i = n - 1; i >= 0; --i) {
        t_table.push_back(gamma * above[static_cast<std::size_t>(i)]);
        omega_table.push_back(grid[static_cast<std::size_t>(i)]);
    }
    t_table.back() = tau;
    for (std::size_t i = 1; i < t_table.size(); ++i) {
        if (!(t_table[i] > t_table[i - 1])) throw std::runtime_error("LAA schedule: non-monotone t(Omega) table");
    }
    boost::math::interpolators::pchip<std::vector<double>> interp(std::move(t_table), std::move(omega_table));
    auto omega_at = [&](double t) { return interp(std::clamp(t, 0.0, tau)); };

    RampSchedule s;
    s.tau = tau;
    s.steps = steps;
    for (int j = 0; j <= steps; ++j) {
        s.times.push_back(tau * j / steps);
        s.omegas.push_back(omega_at(s.times.back()));
    }
    s.times.back() = tau;
    s.omegas.front() = omega0;
    s.omegas.back() = omega_tau;
    for (std::size_t j = 1; j < s.omegas.size(); ++j) {
        if (!(s.omegas[j] < s.omegas[j - 1])) throw std::runtime_error("LAA schedule: omega not strictly decreasing");
    }
    fill_midpoints(s, omega_at);
    return s;
}

double instantaneous_gap(const ModelSpec& spec) {
    switch (spec.model) {
        case ModelKind::LMG: {
            const auto levels = lmg::lmg_even_sector_levels(lmg::build_lmg(spec), 2);
            if (levels.size() < 2) throw std::runtime_error("LMG even sector has a single level");
            return levels[1] - levels[0];
        }
        case ModelKind::TFI:
            return spec.chi * tfi::dispersion(std::numbers::pi / spec.n_spins, spec.omega / spec.chi);
        case ModelKind::ANNNI:
        case ModelKind::RFTI: {
            LanczosOptions options;
            options.sector = spec.model == ModelKind::ANNNI ? SectorFilter::Auto : SectorFilter::None;
            return lanczos_gap(lattice::SparseSpinHamiltonian(spec), options);
        }
    }
    throw std::invalid_argument("instantaneous_gap: unknown model");
}

void Evolver::step_columns(Eigen::MatrixXcd& columns, double omega, double dt, int sign) const {
    parallel_for(static_cast<std::size_t>(columns.cols()), [&](std::size_t j) {
        Eigen::VectorXcd v = columns.col(static_cast<Eigen::Index>(j));
        step(v, omega, dt, sign);
        columns.col(static_cast<Eigen::Index>(j)) = v;
    });
}

std::unique_ptr<Evolver> make_evolver(const ModelSpec& spec, const KrylovOptions& krylov) {
    if (spec.model == ModelKind::LMG) return std::make_unique<LmgEvolver>(spec);
    return std::make_unique<LatticeEvolver>(spec, krylov);
}

StateVector propagate_step(const StateVector& v, const Evolver& evolver, double omega, double dt, int sign) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagate_step: dt must be > 0");
    if (!(v.basis() == evolver.basis())) throw std::invalid_argument("propagate_step: basis mismatch");
    Eigen::VectorXcd a = v.amplitudes();
    evolver.step(a, omega, dt, sign);
    return StateVector(v.basis(), std::move(a));
}

StateVector run_ramp(const StateVector& v0, const Evolver& evolver, const RampSchedule& schedule, int sign,
                     Direction direction) {
    if (!(v0.basis() == evolver.basis())) throw std::invalid_argument("run_ramp: basis mismatch");
    Eigen::MatrixXcd m = v0.amplitudes();
    run_steps(m, evolver, schedule, sign, direction);
    return StateVector(v0.basis(), m.col(0));
}

StateVector run_ramp(const StateVector& v0, const ModelSpec& spec, const RampSchedule& schedule, int sign,
                     Direction direction) {
    return run_ramp(v0, *make_evolver(spec), schedule, sign, direction);
}

EchoSeries run_echo_series(const Evolver& evolver, const StateVector& initial, const StateVector& ramped,
                           const RampSchedule& schedule, EchoKind kind, int phi_points) {
    const int n = initial.basis().n_spins;
    const int k = phi_points > 0 ? phi_points : default_phi_points(n);
    const auto phis = uniform_phi_grid(k);
    Eigen::MatrixXcd columns(static_cast<Eigen::Index>(initial.dimension()), k);
    for (int j = 0; j < k; ++j) columns.col(j) = evolver.rotate(ramped.amplitudes(), phis[static_cast<std::size_t>(j)]);
    run_steps(columns, evolver, schedule, kind == EchoKind::Ideal ? -1 : +1, Direction::Reverse);

    EchoSeries series;
    series.kind = kind;
    series.curve.phis = phis;
    for (int j = 0; j < k; ++j) {
        const double overlap = std::norm(initial.amplitudes().dot(columns.col(j)));
        series.curve.values.push_back(overlap);
        series.points.push_back({phis[static_cast<std::size_t>(j)], overlap, kind, 0.0});
    }
    series.return_fidelity = series.curve.values.front();
    for (auto& p : series.points) p.return_fidelity = series.return_fidelity;
    series.spectrum = analysis::intensities_from_fotoc(
        series.curve, std::min(n, (k - 1) / 2), kind == EchoKind::Ideal ? SpectrumKind::TrueEcho : SpectrumKind::PseudoEcho);
    return series;
}

namespace {

EchoResult single_echo(const ModelSpec& spec, const RampSchedule& schedule, double phi, EchoKind kind) {
    const auto evolver = make_evolver(spec);
    const StateVector initial = evolver->ground_state(schedule.omegas.front());
    const StateVector ramped = run_ramp(initial, *evolver, schedule, +1);
    const int back = kind == EchoKind::Ideal ? -1 : +1;
    Eigen::MatrixXcd columns(static_cast<Eigen::Index>(initial.dimension()), 2);
    columns.col(0) = evolver->rotate(ramped.amplitudes(), phi);
    columns.col(1) = ramped.amplitudes();
    run_steps(columns, *evolver, schedule, back, Direction::Reverse);
    return {phi, std::norm(initial.amplitudes().dot(columns.col(0))), kind,
            std::norm(initial.amplitudes().dot(columns.col(1)))};
}

}  // namespace

EchoResult run_ideal_echo(const ModelSpec& spec, const RampSchedule& schedule, double phi) {
    return single_echo(spec, schedule, phi, EchoKind::Ideal);
}

EchoResult run_pseudo_echo(const ModelSpec& spec, const RampSchedule& schedule, double phi) {
    return single_echo(spec, schedule, phi, EchoKind::Pseudo);
}

RampStudy run_ramp_study(const ModelSpec& spec, const RampSchedule& schedule, bool with_echoes, int phi_points) {
    const auto evolver = make_evolver(spec);
    StateVector initial = evolver->ground_state(schedule.omegas.front());
    StateVector ramped = run_ramp(initial, *evolver, schedule, +1);
    StateVector target = evolver->ground_state(schedule.omegas.back());
    RampStudy study{initial, ramped, target, overlap_fidelity(target, ramped), {}, {}};
    if (with_echoes) {
        study.ideal = run_echo_series(*evolver, initial, ramped, schedule, EchoKind::Ideal, phi_points);
        study.pseudo = run_echo_series(*evolver, initial, ramped, schedule, EchoKind::Pseudo, phi_points);
    }
    return study;
}

CurvatureBound curvature_bound_check(const MqcSpectrum& intensities, const MqcSpectrum& effective) {
    auto weighted = [](const MqcSpectrum& s) {
        double acc = 0.0;
        for (int m = -s.m_max(); m <= s.m_max(); ++m) acc += static_cast<double>(m) * m * std::abs(s.at(m));
        return acc;
    };
    CurvatureBound b;
    b.lhs = weighted(intensities);
    b.rhs = weighted(effective);
    b.qfi_lower_bound = 2.0 * b.rhs;
    b.ok = b.lhs >= b.rhs - 1e-9 * std::max(1.0, b.lhs);
    return b;
}

}  // namespace mqc::dynamics
