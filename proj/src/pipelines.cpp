#include "mqc/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mqc/lanczos.hpp"
#include "mqc/lattice.hpp"
#include "mqc/lmg.hpp"
#include "mqc/parallel.hpp"
#include "mqc/tfi_analytic.hpp"

namespace mqc::pipelines {

namespace {

bool use_analytic(const ModelSpec& spec, Solver solver) {
    if (solver == Solver::Analytic) {
        if (spec.model != ModelKind::TFI) throw std::invalid_argument("analytic solver is only available for TFI");
        return true;
    }
    return solver == Solver::Auto && spec.model == ModelKind::TFI;
}

double spectrum_at(const ModelSpec& spec, const StateVector& v, int m) {
    return spec.model == ModelKind::LMG ? lmg::mqc_of_state(v).real_at(m) : lattice::mqc_of_state(v).real_at(m);
}

}  // namespace

Solver parse_solver(const std::string& name) {
    if (name == "auto") return Solver::Auto;
    if (name == "analytic") return Solver::Analytic;
    if (name == "exact") return Solver::Exact;
    throw std::invalid_argument("unknown solver '" + name + "' (expected auto, analytic or exact)");
}

std::string to_string(Solver solver) {
    switch (solver) {
        case Solver::Auto: return "auto";
        case Solver::Analytic: return "analytic";
        case Solver::Exact: return "exact";
    }
    return "auto";
}

StateVector ground_state(const ModelSpec& spec, double lanczos_tol) {
    spec.validate();
    if (spec.model == ModelKind::LMG) return lmg::lmg_ground_state(lmg::build_lmg(spec));
    const lattice::SparseSpinHamiltonian h(spec);
    return lanczos_ground_state(h, 5000, lanczos_tol).state;
}

MqcSpectrum ground_spectrum(const ModelSpec& spec, const GroundOptions& options) {
    if (use_analytic(spec, options.solver)) return tfi::mqc_from_fotoc_analytic(spec.omega / spec.chi, spec.n_spins);
    const StateVector v = ground_state(spec, options.lanczos_tol);
    return spec.model == ModelKind::LMG ? lmg::mqc_of_state(v) : lattice::mqc_of_state(v);
}

double ground_order_parameter(const ModelSpec& spec, double lanczos_tol) {
    return lattice::order_parameter_abs_sz(ground_state(spec, lanczos_tol)).normalized;
}

std::array<double, 3> intensity_stencil(const ModelSpec& spec, int m, double omega, double d,
                                        const GroundOptions& options) {
    if (use_analytic(spec, options.solver)) {
        const auto at = [&](double w) { return tfi::mqc_intensity(w / spec.chi, spec.n_spins, m); };
        return {at(omega - d), at(omega), at(omega + d)};
    }
    if (spec.model == ModelKind::LMG) {
        const auto at = [&](double w) { return lmg::mqc_of_state(lmg::lmg_ground_state(lmg::build_lmg(spec.with_omega(w)))).real_at(m); };
        return {at(omega - d), at(omega), at(omega + d)};
    }
    const lattice::SparseSpinHamiltonian h(spec.with_omega(omega));
    LanczosOptions lanczos;
    lanczos.tol = options.lanczos_tol;
    const LanczosResult centre = lanczos_lowest(h, lanczos);
    lanczos.start = centre.vector;
    const LanczosResult lo = lanczos_lowest(h.with_omega(omega - d), lanczos);
    const LanczosResult hi = lanczos_lowest(h.with_omega(omega + d), lanczos);
    const SpinBasis basis = h.basis();
    return {spectrum_at(spec, lo.state(basis), m), spectrum_at(spec, centre.state(basis), m),
            spectrum_at(spec, hi.state(basis), m)};
}

analysis::DerivativeScan intensity_scan(const ModelSpec& spec, int m, const std::vector<double>& grid, double fd_step,
                                        const GroundOptions& options) {
    const std::function<std::array<double, 3>(double, double)> stencil = [&](double w, double d) {
        return intensity_stencil(spec, m, w, d, options);
    };
    return analysis::second_derivative_scan(stencil, grid, fd_step);
}

std::vector<double> linear_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("linear_grid needs step > 0 and hi >= lo");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-3)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = lo + step * static_cast<double>(i);
    return grid;
}

PeakSearchResult search_peak(const ModelSpec& spec, int m, const PeakSearch& search, const GroundOptions& options) {
    PeakSearchResult out;
    out.coarse = intensity_scan(spec, m, linear_grid(search.lo, search.hi, search.coarse_step), search.fd_step, options);
    const analysis::PeakLocation coarse = analysis::locate_peak(out.coarse, search.side);
    out.prominence = analysis::peak_prominence(out.coarse.second_derivative, coarse.index, search.side);
    const double centre = out.coarse.omegas[coarse.index];
    std::vector<double> fine;
    for (int k = -search.fine_halfwidth; k <= search.fine_halfwidth; ++k) fine.push_back(centre + search.fine_step * k);
    out.fine = intensity_scan(spec, m, fine, search.fd_step, options);
    out.peak = analysis::locate_peak(out.fine, search.side);
    return out;
}

analysis::PeakLocation smooth_peak(const ModelSpec& spec, int m, double lo, double hi, int points,
                                   analysis::PeakSide side, double fd_step) {
    if (spec.model == ModelKind::TFI) {
        const double chi2 = spec.chi * spec.chi;
        return analysis::refine_peak(
            [&](double w) { return tfi::mqc_second_derivative(w / spec.chi, spec.n_spins, m) / chi2; }, lo, hi, points,
            side);
    }
    const GroundOptions options{Solver::Exact, 1e-12};
    return analysis::refine_peak(
        [&](double w) {
            const auto s = intensity_stencil(spec, m, w, fd_step, options);
            return (s[2] - 2.0 * s[1] + s[0]) / (fd_step * fd_step);
        },
        lo, hi, points, side);
}

std::pair<double, double> lmg_peak_window(int n_spins) {
    const double w = 1.0 / std::sqrt(static_cast<double>(n_spins));
    return {1.0 - 3.0 * w, 1.0 + w};
}

std::pair<double, double> tfi_peak_window(int n_spins) {
    const double w = 1.0 / n_spins;
    return {1.0 - 3.0 * w, 1.0 + w};
}

std::vector<SizePeak> finite_size_peaks(ModelKind model, int m, const std::vector<int>& sizes, int points,
                                        double fd_step) {
    std::vector<SizePeak> out(sizes.size());
    parallel_for(sizes.size(), [&](std::size_t i) {
        ModelSpec spec;
        spec.model = model;
        spec.n_spins = sizes[i];
        spec.chi = 1.0;
        const auto [lo, hi] = model == ModelKind::LMG ? lmg_peak_window(sizes[i]) : tfi_peak_window(sizes[i]);
        out[i].n_spins = sizes[i];
        out[i].peak = smooth_peak(spec, m, lo, hi, points, analysis::PeakSide::Positive, fd_step);
        out[i].offset = 1.0 - out[i].peak.omega;
    });
    return out;
}

DisorderSweep disorder_sweep(const ModelSpec& spec, const std::vector<double>& grid, int realizations,
                             std::uint64_t base_seed, double fd_step, double lanczos_tol) {
    if (realizations < 1) throw std::invalid_argument("disorder_sweep needs at least one realization");
    DisorderSweep out;
    out.seeds.resize(static_cast<std::size_t>(realizations));
    std::vector<analysis::ScanTable> values(out.seeds.size()), curvature(out.seeds.size());
    const GroundOptions options{Solver::Exact, lanczos_tol};
    parallel_for(out.seeds.size(), [&](std::size_t r) {
        out.seeds[r] = lattice::realization_seed(base_seed, r);
        ModelSpec local = spec;
        local.disorder_fields = lattice::draw_disorder(out.seeds[r], spec.disorder_sigma, spec.n_spins).fields;
        const analysis::DerivativeScan scan = intensity_scan(local, 0, grid, fd_step, options);
        const auto rows = static_cast<Eigen::Index>(grid.size());
        values[r] = {grid, {0}, Eigen::Map<const Eigen::VectorXd>(scan.values.data(), rows)};
        curvature[r] = {grid, {0}, Eigen::Map<const Eigen::VectorXd>(scan.second_derivative.data(), rows)};
    });
    out.values = analysis::disorder_average(values);
    out.curvature = analysis::disorder_average(curvature);
    const Eigen::VectorXd mean = out.curvature.mean.values.col(0);
    const std::vector<double> averaged(mean.data(), mean.data() + mean.size());
    const std::size_t imax = analysis::grid_argmax(averaged);
    out.prominence = analysis::peak_prominence(averaged, imax, analysis::PeakSide::Positive);
    try {
        out.peak = analysis::locate_peak(grid, averaged, analysis::PeakSide::Positive);
        out.peak_found = true;
    } catch (const std::runtime_error&) {
        out.peak = {grid[imax], averaged[imax], imax};
    }
    return out;
}

}  // namespace mqc::pipelines
