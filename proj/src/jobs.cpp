#include "mqc/jobs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>

#include "mqc/dynamics.hpp"
#include "mqc/lattice.hpp"
#include "mqc/lmg.hpp"
#include "mqc/parallel.hpp"
#include "mqc/tfi_analytic.hpp"

#ifndef MQC_VERSION
#define MQC_VERSION "dev"
#endif

namespace mqc::jobs {

namespace {

struct KindName {
    JobKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {JobKind::GroundSpectrum, "ground-spectrum"}, {JobKind::FotocCurve, "fotoc-curve"},
    {JobKind::Echo, "echo"},                      {JobKind::PseudoEcho, "pseudo-echo"},
    {JobKind::LaaRamp, "laa-ramp"},               {JobKind::DerivativeScan, "derivative-scan"},
    {JobKind::ScalingFit, "scaling-fit"},         {JobKind::DisorderSweep, "disorder-sweep"},
};

std::string join_path(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

// Typed access to one JSON object with field paths in every error.
class Reader {
public:
    Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!node_.contains(key) || node_.at(key).is_null()) return fallback;
        return convert<T>(node_.at(key), join_path(path_, key));
    }

    std::optional<Reader> child(const std::string& key) {
        seen_.insert(key);
        if (!node_.contains(key)) return std::nullopt;
        return Reader(node_.at(key), join_path(path_, key));
    }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) throw ConfigError(join_path(path_, key), "unknown field");
        }
    }

private:
    template <class T>
    static T convert(const Json& v, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(path, "expected a string");
            return v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (v.is_number_unsigned()) return v.get<std::uint64_t>();
            if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
            throw ConfigError(path, "expected a non-negative integer");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
            return v.get<T>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(path, "expected a number");
            return v.get<T>();
        } else {
            if (!v.is_array()) throw ConfigError(path, "expected an array");
            T out;
            for (std::size_t i = 0; i < v.size(); ++i) {
                out.push_back(convert<typename T::value_type>(v.at(i), path + "[" + std::to_string(i) + "]"));
            }
            return out;
        }
    }

    const Json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class Fn>
auto wrap_field(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

std::string side_name(analysis::PeakSide side) { return side == analysis::PeakSide::Positive ? "positive" : "negative"; }

analysis::PeakSide parse_side(const std::string& name) {
    if (name == "positive") return analysis::PeakSide::Positive;
    if (name == "negative") return analysis::PeakSide::Negative;
    throw std::invalid_argument("expected positive or negative");
}

std::string format_number(double v, bool integer) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    if (integer) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(v)));
    } else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
    }
    return buf;
}

// Number in JSON with a stable textual form.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json peak_json(const analysis::PeakLocation& p) {
    return Json{{"omega_over_chi", num(p.omega)}, {"height", num(p.height)}, {"grid_index", p.index}};
}

Json prominence_json(const analysis::Prominence& p) {
    return Json{{"height_above_background", num(p.height)},
                {"background_std", num(p.background_std)},
                {"ratio", num(p.ratio)},
                {"threshold", analysis::kProminenceThreshold},
                {"resolved", p.resolved}};
}

Json fit_json(const analysis::ScalingFit& f) {
    return Json{{"exponent", num(f.exponent)},
                {"exponent_stderr", num(f.exponent_stderr)},
                {"prefactor", num(f.prefactor)},
                {"window", Json::array({f.window.first, f.window.second})}};
}

int resolved_m_max(const JobConfig& c) {
    const int n = c.model.n_spins;
    return c.analysis.m_max > 0 ? std::min(c.analysis.m_max, n) : n;
}

int resolved_phi_points(const JobConfig& c) {
    return c.protocol.phi_points > 0 ? c.protocol.phi_points : default_phi_points(c.model.n_spins);
}

// RFTI without explicit fields: draw realization 0 from the base seed.
ModelSpec resolved_model(const JobConfig& c) {
    ModelSpec spec = c.model;
    if (spec.model == ModelKind::RFTI && spec.disorder_fields.empty() && spec.disorder_sigma != 0.0) {
        spec.disorder_fields = lattice::draw_disorder(lattice::realization_seed(c.seed, 0), spec.disorder_sigma, spec.n_spins).fields;
    }
    return spec;
}

const Column kOmega{"omega_over_chi", "Omega/chi"};
const Column kOrder{"m", "coherence order w.r.t. S_x", true};
const Column kIntensity{"I_m", "(1/K) sum_j F(phi_j) exp(i m phi_j), sum_m I_m = 1"};

// ---------------------------------------------------------------- jobs

JobOutput ground_spectrum_job(const JobConfig& c) {
    const auto grid = c.omega_grid();
    const int m_max = resolved_m_max(c);
    const ModelSpec base = resolved_model(c);
    const pipelines::GroundOptions options{c.analysis.solver, c.analysis.lanczos_tol};
    const bool analytic = options.solver == pipelines::Solver::Analytic ||
                          (options.solver == pipelines::Solver::Auto && base.model == ModelKind::TFI);
    struct Point {
        MqcSpectrum spectrum{0, {Complex(1.0)}, SpectrumKind::Analytic};
        double order = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Point> points(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        ModelSpec spec = base.with_omega(grid[i] * base.chi);
        if (analytic) {
            points[i].spectrum = pipelines::ground_spectrum(spec, options);
        } else {
            const StateVector v = pipelines::ground_state(spec, options.lanczos_tol);
            points[i].spectrum = spec.model == ModelKind::LMG ? lmg::mqc_of_state(v) : lattice::mqc_of_state(v);
            points[i].order = lattice::order_parameter_abs_sz(v).normalized;
        }
    });
    JobOutput out;
    out.results.columns = {kOmega, kOrder, kIntensity, {"sigma_mqc", "sqrt(sum_m m^2 I_m)"},
                           {"qfi_lower_bound", "2 sum_m m^2 |I_m|"}, {"order_parameter", "2<|S_z|>/N (nan for analytic)"}};
    std::vector<double> i2(grid.size());
    Json rows = Json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& s = points[i].spectrum;
        const double width = analysis::spectrum_width(s);
        const double qfi = analysis::qfi_lower_bound(s);
        for (int m = -m_max; m <= m_max; ++m) out.results.add_row({grid[i], double(m), s.real_at(m), width, qfi, points[i].order});
        i2[i] = s.real_at(2);
        rows.push_back({{"omega_over_chi", grid[i]}, {"sigma_mqc", num(width)}, {"sum_rule", num(s.sum().real())}});
    }
    out.summary["solver"] = analytic ? "analytic" : "exact";
    out.summary["points"] = rows;
    const std::size_t cusp = analysis::grid_argmax(i2);
    out.summary["i2_cusp"] = {{"omega_over_chi", grid[cusp]}, {"I_2", num(i2[cusp])},
                              {"note", "grid argmax of I_2; sits next to the transition on the paramagnetic side"}};
    return out;
}

JobOutput fotoc_curve_job(const JobConfig& c) {
    const auto grid = c.omega_grid();
    const int k = resolved_phi_points(c);
    const auto phis = uniform_phi_grid(k);
    const ModelSpec base = resolved_model(c);
    const bool analytic = c.analysis.solver == pipelines::Solver::Analytic ||
                          (c.analysis.solver == pipelines::Solver::Auto && base.model == ModelKind::TFI);
    std::vector<std::vector<double>> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const ModelSpec spec = base.with_omega(grid[i] * base.chi);
        values[i].resize(phis.size());
        if (analytic) {
            for (std::size_t j = 0; j < phis.size(); ++j) values[i][j] = tfi::fotoc_product(grid[i], phis[j], spec.n_spins);
            return;
        }
        const StateVector v = pipelines::ground_state(spec, c.analysis.lanczos_tol);
        for (std::size_t j = 0; j < phis.size(); ++j) {
            values[i][j] = spec.model == ModelKind::LMG ? lmg::fotoc_of_state(v, phis[j]) : lattice::fotoc_of_state(v, phis[j]);
        }
    });
    JobOutput out;
    out.results.columns = {kOmega, {"phi", "rad, 2 pi j / K"}, {"F", "|<psi|exp(-i phi S_x)|psi>|^2"}};
    double min_f = 1.0, max_f = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < phis.size(); ++j) {
            out.results.add_row({grid[i], phis[j], values[i][j]});
            min_f = std::min(min_f, values[i][j]);
            max_f = std::max(max_f, values[i][j]);
        }
    }
    out.summary["solver"] = analytic ? "analytic" : "exact";
    out.summary["phi_points"] = k;
    out.summary["min_F"] = num(min_f);
    out.summary["max_F"] = num(max_f);
    return out;
}

dynamics::RampSchedule schedule_for(const JobConfig& c, const ModelSpec& spec, double chi_tau) {
    const double tau = chi_tau / spec.chi;
    const int steps = c.protocol.steps > 0 ? c.protocol.steps : dynamics::default_steps(chi_tau);
    const double w0 = c.protocol.omega0 * spec.chi;
    const double w1 = c.protocol.omega_tau * spec.chi;
    if (c.protocol.schedule == "linear") return dynamics::build_linear_schedule(w0, w1, tau, steps);
    return dynamics::build_laa_schedule(
        w0, w1, tau, [&](double w) { return dynamics::instantaneous_gap(spec.with_omega(w)); }, steps);
}

ResultTable schedule_table(const std::vector<std::pair<double, dynamics::RampSchedule>>& schedules) {
    ResultTable t;
    t.columns = {{"chi_tau", "chi * total duration"}, {"chi_t", "chi * time"}, {"omega_over_chi", "Omega(t)/chi"}};
    for (const auto& [chi_tau, s] : schedules) {
        const double chi = chi_tau / s.tau;
        // Thin long schedules to at most ~400 rows each.
        const int stride = std::max(1, s.steps / 400);
        for (int j = 0; j <= s.steps; j += stride) {
            t.add_row({chi_tau, chi * s.times[static_cast<std::size_t>(j)], s.omegas[static_cast<std::size_t>(j)] / chi});
        }
        if (s.steps % stride != 0) t.add_row({chi_tau, chi * s.times.back(), s.omegas.back() / chi});
    }
    return t;
}

JobOutput echo_job(const JobConfig& c, dynamics::EchoKind kind) {
    const ModelSpec spec = resolved_model(c);
    const int k = resolved_phi_points(c);
    JobOutput out;
    out.results.columns = {{"chi_tau", "chi * total duration"}, kOrder,
                           {"re_I", kind == dynamics::EchoKind::Ideal ? "Re I_m" : "Re I~_m (pseudo-echo)"},
                           {"im_I", "Im part"}, {"abs_I", "modulus"}};
    ResultTable curve;
    curve.columns = {{"chi_tau", "chi * total duration"}, {"phi", "rad, 2 pi j / K"}, {"overlap", "|<psi_0|U_back R_phi U|psi_0>|^2"}};
    std::vector<std::pair<double, dynamics::RampSchedule>> schedules;
    Json runs = Json::array();
    for (double chi_tau : c.protocol.chi_taus) {
        const auto schedule = schedule_for(c, spec, chi_tau);
        schedules.emplace_back(chi_tau, schedule);
        const auto evolver = dynamics::make_evolver(spec);
        const StateVector initial = evolver->ground_state(schedule.omegas.front());
        const StateVector ramped = dynamics::run_ramp(initial, *evolver, schedule, +1);
        const StateVector target = evolver->ground_state(schedule.omegas.back());
        const auto series = dynamics::run_echo_series(*evolver, initial, ramped, schedule, kind, k);
        const auto& s = series.spectrum;
        for (int m = -s.m_max(); m <= s.m_max(); ++m) {
            out.results.add_row({chi_tau, double(m), s.at(m).real(), s.at(m).imag(), std::abs(s.at(m))});
        }
        for (std::size_t j = 0; j < series.curve.phis.size(); ++j) curve.add_row({chi_tau, series.curve.phis[j], series.curve.values[j]});
        runs.push_back({{"chi_tau", chi_tau},
                        {"steps", schedule.steps},
                        {"fidelity", num(overlap_fidelity(target, ramped))},
                        {"phi0_overlap", num(series.return_fidelity)},
                        {"sum_I", num(std::abs(s.sum()))}});
    }
    out.summary["kind"] = kind == dynamics::EchoKind::Ideal ? "ideal" : "pseudo";
    out.summary["schedule"] = c.protocol.schedule;
    out.summary["runs"] = runs;
    out.extra_tables.emplace_back("fotoc.csv", std::move(curve));
    out.extra_tables.emplace_back("schedule.csv", schedule_table(schedules));
    return out;
}

JobOutput laa_ramp_job(const JobConfig& c) {
    const ModelSpec spec = resolved_model(c);
    const int k = resolved_phi_points(c);
    JobOutput out;
    out.results.columns = {{"chi_tau", "chi * total duration"}, kOrder,
                           {"I_m", "ideal echo, real"},
                           {"re_I_eff", "Re I~_m (pseudo-echo)"},
                           {"im_I_eff", "Im I~_m"},
                           {"abs_I_eff", "|I~_m|"},
                           {"I_m_gs", "ground state at Omega(tau)"}};
    std::vector<std::pair<double, dynamics::RampSchedule>> schedules;
    Json runs = Json::array();
    for (double chi_tau : c.protocol.chi_taus) {
        const auto schedule = schedule_for(c, spec, chi_tau);
        schedules.emplace_back(chi_tau, schedule);
        const auto study = dynamics::run_ramp_study(spec, schedule, true, k);
        const MqcSpectrum gs = spec.model == ModelKind::LMG ? lmg::mqc_of_state(study.target) : lattice::mqc_of_state(study.target);
        const auto& ideal = study.ideal.spectrum;
        const auto& eff = study.pseudo.spectrum;
        double max_complex = 0.0, max_abs = 0.0;
        for (int m = -eff.m_max(); m <= eff.m_max(); ++m) {
            out.results.add_row({chi_tau, double(m), ideal.real_at(m), eff.at(m).real(), eff.at(m).imag(), std::abs(eff.at(m)), gs.real_at(m)});
            max_complex = std::max(max_complex, std::abs(eff.at(m) - gs.at(m)));
            max_abs = std::max(max_abs, std::abs(std::abs(eff.at(m)) - gs.real_at(m)));
        }
        const auto bound = dynamics::curvature_bound_check(ideal, eff);
        runs.push_back({{"chi_tau", chi_tau},
                        {"steps", schedule.steps},
                        {"fidelity", num(study.fidelity)},
                        {"return_fidelity", num(study.pseudo.return_fidelity)},
                        {"ideal_phi0_overlap", num(study.ideal.return_fidelity)},
                        {"abs_I0_eff_minus_I0", num(std::abs(eff.at(0) - ideal.at(0)))},
                        {"max_abs_I_eff_minus_gs", num(max_abs)},
                        {"max_complex_I_eff_minus_gs", num(max_complex)},
                        {"curvature_bound", {{"sum_m2_abs_I", num(bound.lhs)}, {"sum_m2_abs_I_eff", num(bound.rhs)}, {"holds", bound.ok}}},
                        {"qfi_lower_bound_eff", num(bound.qfi_lower_bound)},
                        {"sigma_mqc_gs", num(analysis::spectrum_width(gs))}});
    }
    out.summary["schedule"] = c.protocol.schedule;
    out.summary["runs"] = runs;
    out.extra_tables.emplace_back("schedule.csv", schedule_table(schedules));
    return out;
}

JobOutput derivative_scan_job(const JobConfig& c) {
    const ModelSpec spec = resolved_model(c);
    const pipelines::GroundOptions options{c.analysis.solver, c.analysis.lanczos_tol};
    const int m = c.analysis.order;
    JobOutput out;
    out.results.columns = {{"stage", "0 coarse, 1 fine", true}, kOmega,
                           {"I_m", "ground-state intensity of order m"},
                           {"d2I_dOmega2", "chi^-2, central difference with step fd_step"}};
    const auto emit = [&](int stage, const analysis::DerivativeScan& scan) {
        for (std::size_t i = 0; i < scan.omegas.size(); ++i) {
            out.results.add_row({double(stage), scan.omegas[i] / spec.chi, scan.values[i], scan.second_derivative[i]});
        }
    };
    const auto grid = c.omega_grid();
    std::vector<double> scaled(grid.size());
    std::transform(grid.begin(), grid.end(), scaled.begin(), [&](double w) { return w * spec.chi; });
    if (c.analysis.fine_step > 0.0) {
        if (grid.size() < 3) throw ConfigError("analysis.omega_step", "peak search needs at least 3 grid points");
        pipelines::PeakSearch search;
        search.lo = scaled.front();
        search.hi = scaled.back();
        search.coarse_step = (scaled.back() - scaled.front()) / static_cast<double>(grid.size() - 1);
        search.fine_step = c.analysis.fine_step * spec.chi;
        search.fine_halfwidth = c.analysis.fine_halfwidth;
        search.side = c.analysis.peak_side;
        search.fd_step = c.analysis.fd_step;
        const auto result = pipelines::search_peak(spec, m, search, options);
        emit(0, result.coarse);
        emit(1, result.fine);
        auto peak = result.peak;
        peak.omega /= spec.chi;
        out.summary["peak"] = peak_json(peak);
        out.summary["prominence"] = prominence_json(result.prominence);
    } else {
        const auto scan = pipelines::intensity_scan(spec, m, scaled, c.analysis.fd_step, options);
        emit(0, scan);
        const std::size_t imax = c.analysis.peak_side == analysis::PeakSide::Positive
                                     ? analysis::grid_argmax(scan.second_derivative)
                                     : static_cast<std::size_t>(std::min_element(scan.second_derivative.begin(), scan.second_derivative.end()) -
                                                                scan.second_derivative.begin());
        out.summary["prominence"] = prominence_json(analysis::peak_prominence(scan.second_derivative, imax, c.analysis.peak_side));
        try {
            auto peak = analysis::locate_peak(scan, c.analysis.peak_side);
            peak.omega /= spec.chi;
            out.summary["peak"] = peak_json(peak);
        } catch (const std::runtime_error& e) {
            out.summary["peak"] = nullptr;
            out.summary["peak_error"] = e.what();
        }
    }
    out.summary["order"] = m;
    out.summary["side"] = side_name(c.analysis.peak_side);
    out.summary["fd_step"] = c.analysis.fd_step;
    return out;
}

JobOutput scaling_fit_job(const JobConfig& c) {
    const ModelKind model = c.model.model;
    if (model != ModelKind::LMG && model != ModelKind::TFI) throw ConfigError("model.kind", "scaling-fit supports LMG and TFI");
    std::vector<int> sizes = c.analysis.sizes;
    if (sizes.empty()) sizes = model == ModelKind::LMG ? std::vector<int>{200, 400, 800, 1600} : std::vector<int>{200, 500, 1000, 2000, 5000};
    const auto peaks = pipelines::finite_size_peaks(model, c.analysis.order, sizes, c.analysis.peak_points, c.analysis.fd_step);
    JobOutput out;
    out.results.columns = {{"N", "spins", true}, {"omega_star", "Omega*/chi at the positive d2I_m/dOmega2 peak"},
                           {"offset", "1 - Omega*/chi"}, {"peak_height", "d2I_m/dOmega2 at the peak, chi^-2"}};
    std::vector<double> ns, offsets, heights;
    for (const auto& p : peaks) {
        out.results.add_row({double(p.n_spins), p.peak.omega, p.offset, p.peak.height});
        ns.push_back(p.n_spins);
        offsets.push_back(p.offset);
        heights.push_back(p.peak.height);
    }
    out.summary["order"] = c.analysis.order;
    out.summary["offset_fit"] = fit_json(analysis::fit_power_law(ns, offsets));
    out.summary["height_fit"] = fit_json(analysis::fit_power_law(ns, heights));
    return out;
}

JobOutput disorder_sweep_job(const JobConfig& c) {
    if (c.model.model != ModelKind::RFTI) throw ConfigError("model.kind", "disorder-sweep needs RFTI");
    const auto grid = c.omega_grid();
    std::vector<double> scaled(grid.size());
    std::transform(grid.begin(), grid.end(), scaled.begin(), [&](double w) { return w * c.model.chi; });
    ModelSpec spec = c.model;
    spec.disorder_fields.clear();
    const auto sweep = pipelines::disorder_sweep(spec, scaled, c.realizations, c.seed, c.analysis.fd_step, c.analysis.lanczos_tol);
    JobOutput out;
    out.results.columns = {kOmega, {"I_0_mean", "realization mean"}, {"I_0_sem", "standard error of the mean"},
                           {"d2I0_dOmega2_mean", "chi^-2, realization mean"}, {"d2I0_dOmega2_sem", "standard error of the mean"}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out.results.add_row({grid[i], sweep.values.mean.values(r, 0), sweep.values.standard_error(r, 0),
                             sweep.curvature.mean.values(r, 0), sweep.curvature.standard_error(r, 0)});
    }
    auto peak = sweep.peak;
    peak.omega /= c.model.chi;
    out.summary["realizations"] = c.realizations;
    out.summary["disorder_sigma_over_chi"] = c.model.disorder_sigma / c.model.chi;
    out.summary["peak"] = peak_json(peak);
    out.summary["peak_interior"] = sweep.peak_found;
    out.summary["prominence"] = prominence_json(sweep.prominence);
    out.summary["peak_resolved"] = sweep.peak_found && sweep.prominence.resolved;
    return out;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

}  // namespace

// ---------------------------------------------------------------- names and errors

std::string to_string(JobKind kind) {
    for (const auto& k : kKindNames) if (k.kind == kind) return k.name;
    return "?";
}

JobKind parse_job_kind(const std::string& name) {
    for (const auto& k : kKindNames) if (name == k.name) return k.kind;
    std::string known;
    for (const auto& k : kKindNames) known += (known.empty() ? "" : ", ") + std::string(k.name);
    throw std::invalid_argument("unknown job '" + name + "' (expected one of: " + known + ")");
}

const std::vector<JobKind>& all_job_kinds() {
    static const std::vector<JobKind> kinds = [] {
        std::vector<JobKind> v;
        for (const auto& k : kKindNames) v.push_back(k.kind);
        return v;
    }();
    return kinds;
}

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}

ResourceError::ResourceError(std::uint64_t required, std::uint64_t budget)
    : std::runtime_error("memory budget exceeded: job needs about " + std::to_string(required) + " bytes, budget is " +
                         std::to_string(budget) + " bytes (raise " + kMemoryBudgetEnv + ")"),
      required_(required),
      budget_(budget) {}

// ---------------------------------------------------------------- config

std::vector<double> JobConfig::omega_grid() const {
    if (!analysis.omegas.empty()) return analysis.omegas;
    return pipelines::linear_grid(analysis.omega_min, analysis.omega_max, analysis.omega_step);
}

JobConfig config_from_json(const Json& doc) {
    JobConfig c;
    Reader root(doc, "");
    c.job = wrap_field("job", [&] { return parse_job_kind(root.get<std::string>("job", "")); });
    c.seed = root.get<std::uint64_t>("seed", c.seed);
    c.workers = root.get<int>("workers", c.workers);
    if (c.workers < 0) throw ConfigError("workers", "must be >= 0");

    if (auto m = root.child("model")) {
        c.model.model = wrap_field("model.kind", [&] { return parse_model_kind(m->get<std::string>("kind", "TFI")); });
        c.model.n_spins = m->get<int>("n_spins", c.model.n_spins);
        c.model.chi = m->get<double>("chi", c.model.chi);
        c.model.omega = m->get<double>("omega", c.model.omega);
        c.model.gamma = m->get<double>("gamma", c.model.gamma);
        c.model.disorder_sigma = m->get<double>("disorder_sigma", c.model.disorder_sigma);
        c.model.disorder_fields = m->get<std::vector<double>>("disorder_fields", {});
        m->finish();
    }
    if (!(c.model.chi > 0.0)) throw ConfigError("model.chi", "must be > 0");
    if (c.model.disorder_sigma < 0.0) throw ConfigError("model.disorder_sigma", "must be >= 0");

    if (auto p = root.child("protocol")) {
        c.protocol.schedule = p->get<std::string>("schedule", c.protocol.schedule);
        c.protocol.omega0 = p->get<double>("omega0", c.protocol.omega0);
        c.protocol.omega_tau = p->get<double>("omega_tau", c.protocol.omega_tau);
        c.protocol.chi_taus = p->get<std::vector<double>>("chi_taus", c.protocol.chi_taus);
        c.protocol.steps = p->get<int>("steps", c.protocol.steps);
        c.protocol.phi_points = p->get<int>("phi_points", c.protocol.phi_points);
        p->finish();
    }
    if (c.protocol.schedule != "laa" && c.protocol.schedule != "linear") throw ConfigError("protocol.schedule", "expected laa or linear");
    if (c.protocol.chi_taus.empty()) throw ConfigError("protocol.chi_taus", "needs at least one duration");
    for (std::size_t i = 0; i < c.protocol.chi_taus.size(); ++i) {
        if (!(c.protocol.chi_taus[i] > 0.0)) throw ConfigError("protocol.chi_taus[" + std::to_string(i) + "]", "must be > 0");
    }
    if (c.protocol.steps < 0) throw ConfigError("protocol.steps", "must be >= 0");
    if (c.protocol.phi_points != 0 && c.protocol.phi_points < 2 * c.model.n_spins + 1) {
        throw ConfigError("protocol.phi_points", "must be 0 or at least 2N + 1");
    }

    if (auto a = root.child("analysis")) {
        c.analysis.omegas = a->get<std::vector<double>>("omegas", {});
        c.analysis.omega_min = a->get<double>("omega_min", c.analysis.omega_min);
        c.analysis.omega_max = a->get<double>("omega_max", c.analysis.omega_max);
        c.analysis.omega_step = a->get<double>("omega_step", c.analysis.omega_step);
        c.analysis.order = a->get<int>("order", c.analysis.order);
        c.analysis.m_max = a->get<int>("m_max", c.analysis.m_max);
        c.analysis.fd_step = a->get<double>("fd_step", c.analysis.fd_step);
        c.analysis.peak_side = wrap_field("analysis.peak_side", [&] { return parse_side(a->get<std::string>("peak_side", "positive")); });
        c.analysis.fine_step = a->get<double>("fine_step", c.analysis.fine_step);
        c.analysis.fine_halfwidth = a->get<int>("fine_halfwidth", c.analysis.fine_halfwidth);
        c.analysis.sizes = a->get<std::vector<int>>("sizes", {});
        c.analysis.peak_points = a->get<int>("peak_points", c.analysis.peak_points);
        c.analysis.solver = wrap_field("analysis.solver", [&] { return pipelines::parse_solver(a->get<std::string>("solver", "auto")); });
        c.analysis.lanczos_tol = a->get<double>("lanczos_tol", c.analysis.lanczos_tol);
        a->finish();
    }
    if (c.analysis.omegas.empty()) {
        if (!(c.analysis.omega_step > 0.0)) throw ConfigError("analysis.omega_step", "must be > 0");
        if (!(c.analysis.omega_max >= c.analysis.omega_min)) throw ConfigError("analysis.omega_max", "must be >= omega_min");
    }
    if (!(c.analysis.fd_step > 0.0)) throw ConfigError("analysis.fd_step", "must be > 0");
    if (c.analysis.fine_step < 0.0) throw ConfigError("analysis.fine_step", "must be >= 0");
    if (c.analysis.fine_halfwidth < 1) throw ConfigError("analysis.fine_halfwidth", "must be >= 1");
    if (c.analysis.peak_points < 3) throw ConfigError("analysis.peak_points", "must be >= 3");
    if (!(c.analysis.lanczos_tol > 0.0)) throw ConfigError("analysis.lanczos_tol", "must be > 0");
    if (c.analysis.m_max < 0) throw ConfigError("analysis.m_max", "must be >= 0");
    for (std::size_t i = 0; i < c.analysis.sizes.size(); ++i) {
        if (c.analysis.sizes[i] < 2) throw ConfigError("analysis.sizes[" + std::to_string(i) + "]", "must be >= 2");
    }

    // Scaling fits pick their own sizes. The analytic TFI pipeline has no 2^N state, so
    // the bitstring cap only applies when a state vector is built.
    const bool analytic_tfi = c.model.model == ModelKind::TFI && c.analysis.solver != pipelines::Solver::Exact &&
                              (c.job == JobKind::GroundSpectrum || c.job == JobKind::FotocCurve || c.job == JobKind::DerivativeScan);
    if (c.job != JobKind::ScalingFit) {
        wrap_field("model", [&] {
            c.model.validate(analytic_tfi ? std::numeric_limits<int>::max() : kDefaultBitstringCap);
            return 0;
        });
    }
    if (c.analysis.solver == pipelines::Solver::Analytic && c.model.model != ModelKind::TFI) {
        throw ConfigError("analysis.solver", "analytic is only available for TFI");
    }

    if (auto d = root.child("disorder")) {
        c.realizations = d->get<int>("realizations", c.realizations);
        d->finish();
    }
    if (c.realizations < 1) throw ConfigError("disorder.realizations", "must be >= 1");

    if (auto o = root.child("output")) {
        c.formats = o->get<std::vector<std::string>>("formats", c.formats);
        o->finish();
    }
    for (std::size_t i = 0; i < c.formats.size(); ++i) {
        if (c.formats[i] != "csv" && c.formats[i] != "json") {
            throw ConfigError("output.formats[" + std::to_string(i) + "]", "expected csv or json");
        }
    }
    root.finish();
    return c;
}

Json config_to_json(const JobConfig& c) {
    Json doc;
    doc["job"] = to_string(c.job);
    doc["model"] = {{"kind", mqc::to_string(c.model.model)},
                    {"n_spins", c.model.n_spins},
                    {"chi", c.model.chi},
                    {"omega", c.model.omega},
                    {"gamma", c.model.gamma},
                    {"disorder_sigma", c.model.disorder_sigma},
                    {"disorder_fields", c.model.disorder_fields}};
    doc["protocol"] = {{"schedule", c.protocol.schedule},   {"omega0", c.protocol.omega0},
                       {"omega_tau", c.protocol.omega_tau}, {"chi_taus", c.protocol.chi_taus},
                       {"steps", c.protocol.steps},         {"phi_points", c.protocol.phi_points}};
    doc["analysis"] = {{"omegas", c.analysis.omegas},
                       {"omega_min", c.analysis.omega_min},
                       {"omega_max", c.analysis.omega_max},
                       {"omega_step", c.analysis.omega_step},
                       {"order", c.analysis.order},
                       {"m_max", c.analysis.m_max},
                       {"fd_step", c.analysis.fd_step},
                       {"peak_side", side_name(c.analysis.peak_side)},
                       {"fine_step", c.analysis.fine_step},
                       {"fine_halfwidth", c.analysis.fine_halfwidth},
                       {"sizes", c.analysis.sizes},
                       {"peak_points", c.analysis.peak_points},
                       {"solver", pipelines::to_string(c.analysis.solver)},
                       {"lanczos_tol", c.analysis.lanczos_tol}};
    doc["disorder"] = {{"realizations", c.realizations}};
    doc["output"] = {{"formats", c.formats}};
    doc["seed"] = c.seed;
    doc["workers"] = c.workers;
    return doc;
}

void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key.path=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    Json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError(key, "empty path component");
        if (!node->is_object()) throw ConfigError(key.substr(0, start ? start - 1 : 0), "not an object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = Json::object();
        start = dot + 1;
    }
}

// ---------------------------------------------------------------- resources

std::uint64_t memory_budget() {
    constexpr std::uint64_t kDefault = std::uint64_t{8} << 30;
    const char* env = std::getenv(kMemoryBudgetEnv);
    if (!env || !*env) return kDefault;
    std::string s = env;
    std::uint64_t scale = 1;
    const char last = static_cast<char>(std::toupper(static_cast<unsigned char>(s.back())));
    if (last == 'K' || last == 'M' || last == 'G') {
        scale = last == 'K' ? (1u << 10) : last == 'M' ? (1u << 20) : (1u << 30);
        s.pop_back();
    }
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(v) * scale;
    } catch (const std::exception&) {
        throw ConfigError(kMemoryBudgetEnv, "expected a byte count such as 4000000000 or 4G");
    }
}

std::uint64_t estimate_memory(const JobConfig& c) {
    const ModelSpec& m = c.model;
    const std::uint64_t workers = static_cast<std::uint64_t>(c.workers > 0 ? c.workers : worker_count());
    if (c.job == JobKind::ScalingFit) {
        std::uint64_t largest = 0;
        for (int n : c.analysis.sizes) largest = std::max<std::uint64_t>(largest, static_cast<std::uint64_t>(n));
        if (largest == 0) largest = m.model == ModelKind::LMG ? 1600 : 5000;
        // Dense S_x eigenbasis for LMG; a few vectors for the analytic TFI pipeline.
        return m.model == ModelKind::LMG ? (largest + 1) * (largest + 1) * 8 * 2 : largest * 64;
    }
    if (m.model == ModelKind::LMG) {
        const std::uint64_t d = static_cast<std::uint64_t>(m.n_spins) + 1;
        const std::uint64_t k = static_cast<std::uint64_t>(resolved_phi_points(c));
        return d * d * 8 * 2 + d * k * 16 * 2;
    }
    const bool analytic = m.model == ModelKind::TFI && (c.analysis.solver == pipelines::Solver::Analytic ||
                                                        (c.analysis.solver == pipelines::Solver::Auto &&
                                                         (c.job == JobKind::GroundSpectrum || c.job == JobKind::FotocCurve ||
                                                          c.job == JobKind::DerivativeScan)));
    if (analytic) return static_cast<std::uint64_t>(m.n_spins) * 1024;
    const std::uint64_t full = std::uint64_t{1} << m.n_spins;
    switch (c.job) {
        case JobKind::Echo:
        case JobKind::PseudoEcho:
        case JobKind::LaaRamp: {
            // Rotated columns plus one Krylov basis per worker.
            const std::uint64_t k = static_cast<std::uint64_t>(resolved_phi_points(c));
            return full * 16 * (k + 4 + workers * 22);
        }
        default: {
            // Lanczos basis (reduced sector when available) plus a few full-space vectors per worker.
            const bool reduced = lattice::has_symmetric_sector(m);
            const std::uint64_t basis = reduced ? full / static_cast<std::uint64_t>(m.n_spins) : full;
            return workers * (basis * 8 * 122 + full * 16 * 8) + (reduced ? full * 4 : 0);
        }
    }
}

// ---------------------------------------------------------------- tables

void ResultTable::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::logic_error("ResultTable: row width mismatch");
    rows.push_back(std::move(row));
}

std::string ResultTable::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        std::string head = columns[i].name + " [" + columns[i].unit + "]";
        // Quote headers that contain commas.
        if (head.find(',') != std::string::npos) head = "\"" + head + "\"";
        out += head;
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i], columns[i].integer);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------- running

std::string tool_version() { return MQC_VERSION; }

JobOutput run_job(const JobConfig& c) {
    switch (c.job) {
        case JobKind::GroundSpectrum: return ground_spectrum_job(c);
        case JobKind::FotocCurve: return fotoc_curve_job(c);
        case JobKind::Echo: return echo_job(c, dynamics::EchoKind::Ideal);
        case JobKind::PseudoEcho: return echo_job(c, dynamics::EchoKind::Pseudo);
        case JobKind::LaaRamp: return laa_ramp_job(c);
        case JobKind::DerivativeScan: return derivative_scan_job(c);
        case JobKind::ScalingFit: return scaling_fit_job(c);
        case JobKind::DisorderSweep: return disorder_sweep_job(c);
    }
    throw std::logic_error("run_job: unknown job");
}

JobOutput run_and_write(const JobConfig& c, const std::filesystem::path& out_dir) {
    const std::uint64_t need = estimate_memory(c);
    const std::uint64_t budget = memory_budget();
    if (need > budget) throw ResourceError(need, budget);
    if (c.workers > 0) set_worker_count(c.workers);

    JobOutput out = run_job(c);
    std::filesystem::create_directories(out_dir);
    const bool csv = std::find(c.formats.begin(), c.formats.end(), "csv") != c.formats.end();
    const bool json = std::find(c.formats.begin(), c.formats.end(), "json") != c.formats.end();
    std::vector<std::string> files;
    if (csv) {
        write_file(out_dir / "results.csv", out.results.to_csv());
        files.push_back("results.csv");
        for (const auto& [name, table] : out.extra_tables) {
            write_file(out_dir / name, table.to_csv());
            files.push_back(name);
        }
    }
    if (json) {
        Json summary;
        summary["job"] = to_string(c.job);
        summary["model"] = mqc::to_string(c.model.model);
        summary["n_spins"] = c.model.n_spins;
        for (const auto& [key, value] : out.summary.items()) summary[key] = value;
        write_file(out_dir / "summary.json", summary.dump(2) + "\n");
        files.push_back("summary.json");
    }
    Json seeds{{"base", c.seed}};
    if (c.job == JobKind::DisorderSweep) {
        Json list = Json::array();
        for (int r = 0; r < c.realizations; ++r) list.push_back(lattice::realization_seed(c.seed, static_cast<std::uint64_t>(r)));
        seeds["realizations"] = list;
    } else if (c.model.model == ModelKind::RFTI && c.model.disorder_fields.empty() && c.model.disorder_sigma != 0.0) {
        seeds["realizations"] = Json::array({lattice::realization_seed(c.seed, 0)});
    }
    Json manifest{{"tool", "mqc-echo"},
                  {"version", tool_version()},
                  {"config", config_to_json(c)},
                  {"seeds", seeds},
                  {"memory_estimate_bytes", need},
                  {"files", files}};
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return out;
}

// ---------------------------------------------------------------- catalog

const std::vector<Recipe>& list_jobs() {
    static const std::vector<Recipe> recipes = [] {
        std::vector<Recipe> r;
        const auto add = [&](std::string name, std::string description, std::string scale, std::string runtime, Json config) {
            r.push_back({std::move(name), std::move(description), std::move(scale), std::move(runtime), std::move(config)});
        };
        add("fig1-tfi-ground-spectrum", "TFI N=20 analytic ground-state MQC spectra across the transition", "fast", "seconds",
            Json::parse(R"({"job":"ground-spectrum","model":{"kind":"TFI","n_spins":20},
                "analysis":{"omega_min":0.05,"omega_max":2.0,"omega_step":0.05,"solver":"analytic"}})"));
        add("fig1-lmg-ground-spectrum", "LMG N=50 ground-state MQC spectra and 2<|S_z|>/N", "fast", "seconds",
            Json::parse(R"({"job":"ground-spectrum","model":{"kind":"LMG","n_spins":50},
                "analysis":{"omega_min":0.05,"omega_max":2.0,"omega_step":0.05}})"));
        add("fig2-tfi-derivative", "TFI N=300 d2I_0/dOmega2 from the analytic pipeline", "fast", "seconds",
            Json::parse(R"({"job":"derivative-scan","model":{"kind":"TFI","n_spins":300},
                "analysis":{"omega_min":0.8,"omega_max":1.2,"omega_step":0.005,"fine_step":0.0005}})"));
        add("fig2-lmg-derivative", "LMG N=400 d2I_0/dOmega2 from dense Dicke solves", "fast", "seconds",
            Json::parse(R"({"job":"derivative-scan","model":{"kind":"LMG","n_spins":400},
                "analysis":{"omega_min":0.7,"omega_max":1.2,"omega_step":0.01,"fine_step":0.001}})"));
        add("fig3-lmg-pseudo-echo", "LMG N=50 LAA ramps chi tau = 10 and 100, pseudo-echo intensities", "fast", "seconds",
            Json::parse(R"({"job":"laa-ramp","model":{"kind":"LMG","n_spins":50},
                "protocol":{"omega0":10.0,"omega_tau":0.01,"chi_taus":[10,100]}})"));
        add("fig3-tfi-n14", "TFI N=14 LAA ramp chi tau = 100 (CI-scale surrogate of the N=20 run)", "ci", "about a minute",
            Json::parse(R"({"job":"laa-ramp","model":{"kind":"TFI","n_spins":14},
                "protocol":{"omega0":100.0,"omega_tau":0.01,"chi_taus":[100]}})"));
        add("fig3-tfi-n20", "TFI N=20 LAA ramp chi tau = 100 with echo spectra", "long-running", "hours",
            Json::parse(R"({"job":"laa-ramp","model":{"kind":"TFI","n_spins":20},
                "protocol":{"omega0":100.0,"omega_tau":0.01,"chi_taus":[100]}})"));
        add("figS1-laa-ramps", "LMG N=50 LAA schedules and fidelities for chi tau = 3, 10, 30, 100", "fast", "seconds",
            Json::parse(R"({"job":"laa-ramp","model":{"kind":"LMG","n_spins":50},
                "protocol":{"omega0":10.0,"omega_tau":0.01,"chi_taus":[3,10,30,100]}})"));
        add("figS2-tfi-derivative-n1000", "TFI N=1000 d2I_0/dOmega2 near g = 1 (peak grows with N)", "fast", "seconds",
            Json::parse(R"({"job":"derivative-scan","model":{"kind":"TFI","n_spins":1000},
                "analysis":{"omega_min":0.95,"omega_max":1.05,"omega_step":0.002,"fine_step":0.0001}})"));
        add("figS3-annni-gamma-m0.2", "ANNNI N=20, gamma/chi = -0.2: Lanczos d2I_0/dOmega2 peak", "ci", "about a minute",
            Json::parse(R"({"job":"derivative-scan","model":{"kind":"ANNNI","n_spins":20,"gamma":-0.2},
                "analysis":{"omega_min":0.3,"omega_max":2.0,"omega_step":0.05,"fine_step":0.01,"lanczos_tol":1e-12}})"));
        add("figS3-annni-gamma-0.0", "ANNNI N=20, gamma/chi = 0: Lanczos d2I_0/dOmega2 peak", "ci", "about a minute",
            Json::parse(R"({"job":"derivative-scan","model":{"kind":"ANNNI","n_spins":20,"gamma":0.0},
                "analysis":{"omega_min":0.3,"omega_max":2.0,"omega_step":0.05,"fine_step":0.01,"lanczos_tol":1e-12}})"));
        add("figS3-annni-gamma-0.3", "ANNNI N=20, gamma/chi = 0.3: Lanczos d2I_0/dOmega2 peak", "ci", "about a minute",
            Json::parse(R"({"job":"derivative-scan","model":{"kind":"ANNNI","n_spins":20,"gamma":0.3},
                "analysis":{"omega_min":0.3,"omega_max":2.0,"omega_step":0.05,"fine_step":0.01,"lanczos_tol":1e-12}})"));
        add("figS4-lmg-scaling", "LMG peak offsets 1 - Omega*/chi over N = 200..1600", "fast", "seconds",
            Json::parse(R"({"job":"scaling-fit","model":{"kind":"LMG"},"analysis":{"sizes":[200,400,800,1600]}})"));
        add("figS4-tfi-scaling", "TFI analytic peak offsets over N = 200..5000", "fast", "under a minute",
            Json::parse(R"({"job":"scaling-fit","model":{"kind":"TFI"},"analysis":{"sizes":[200,500,1000,2000,5000]}})"));
        add("figS5-rfti-disorder", "RFTI N=20, Delta/chi = 0.1, disorder-averaged d2I_0/dOmega2 (disorder.realizations, default 100)",
            "long-running", "hours",
            Json::parse(R"({"job":"disorder-sweep","model":{"kind":"RFTI","n_spins":20,"disorder_sigma":0.1},
                "analysis":{"omega_min":0.6,"omega_max":1.4,"omega_step":0.02},"disorder":{"realizations":100}})"));
        add("figS5-rfti-strong-disorder", "RFTI N=20, Delta/chi = 1.0: the averaged peak is not resolvable", "long-running", "hours",
            Json::parse(R"({"job":"disorder-sweep","model":{"kind":"RFTI","n_spins":20,"disorder_sigma":1.0},
                "analysis":{"omega_min":0.6,"omega_max":1.4,"omega_step":0.02},"disorder":{"realizations":100}})"));
        add("figS5-rfti-n12", "RFTI N=12, Delta/chi = 0.1, 10 realizations (CI surrogate)", "fast", "seconds",
            Json::parse(R"({"job":"disorder-sweep","model":{"kind":"RFTI","n_spins":12,"disorder_sigma":0.1},
                "analysis":{"omega_min":0.6,"omega_max":1.4,"omega_step":0.02},"disorder":{"realizations":10}})"));
        return r;
    }();
    return recipes;
}

std::optional<Recipe> find_recipe(const std::string& name) {
    for (const auto& r : list_jobs()) if (r.name == name) return r;
    return std::nullopt;
}

}  // namespace mqc::jobs
