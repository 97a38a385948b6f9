#include "mqc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "mqc/parallel.hpp"

namespace mqc::analysis {

MqcSpectrum intensities_from_fotoc(const FotocCurve& curve, int m_max, SpectrumKind kind) {
    const auto k = static_cast<int>(curve.phis.size());
    if (k == 0 || curve.values.size() != curve.phis.size()) throw std::invalid_argument("FOTOC curve is empty or ragged");
    if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
    if (k < 2 * m_max + 1) {
        throw std::invalid_argument("phi grid of " + std::to_string(k) + " points aliases orders up to " + std::to_string(m_max));
    }
    for (int j = 0; j < k; ++j) {
        if (std::abs(curve.phis[static_cast<std::size_t>(j)] - 2.0 * std::numbers::pi * j / k) > 1e-12) {
            throw std::invalid_argument("FOTOC curve is not on the uniform grid 2 pi j / K");
        }
    }
    std::vector<Complex> intensities(static_cast<std::size_t>(2 * m_max + 1));
    for (int m = -m_max; m <= m_max; ++m) {
        Complex acc = 0.0;
        for (int j = 0; j < k; ++j) {
            const long long idx = ((static_cast<long long>(m) * j) % k + k) % k;
            acc += curve.values[static_cast<std::size_t>(j)] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(idx) / k);
        }
        intensities[static_cast<std::size_t>(m + m_max)] = acc / static_cast<double>(k);
    }
    MqcSpectrum spectrum(m_max, std::move(intensities), kind);
    if (kind != SpectrumKind::PseudoEcho) {
        if (auto violation = spectrum.check_invariants(curve.values.front())) throw std::runtime_error("spectrum invariant: " + *violation);
    }
    return spectrum;
}

std::vector<Complex> resynthesize(const MqcSpectrum& spectrum, const std::vector<double>& phis) {
    std::vector<Complex> out;
    out.reserve(phis.size());
    for (double phi : phis) {
        Complex acc = 0.0;
        for (int m = -spectrum.m_max(); m <= spectrum.m_max(); ++m) acc += spectrum.at(m) * std::polar(1.0, -m * phi);
        out.push_back(acc);
    }
    return out;
}

double spectrum_width(const MqcSpectrum& spectrum) {
    double acc = 0.0;
    for (int m = -spectrum.m_max(); m <= spectrum.m_max(); ++m) acc += static_cast<double>(m) * m * spectrum.real_at(m);
    return std::sqrt(std::max(0.0, acc));
}

double qfi_lower_bound(const MqcSpectrum& spectrum) {
    double acc = 0.0;
    for (int m = -spectrum.m_max(); m <= spectrum.m_max(); ++m) acc += static_cast<double>(m) * m * std::abs(spectrum.at(m));
    return 2.0 * acc;
}

DerivativeScan second_derivative_scan(const std::function<std::array<double, 3>(double, double)>& stencil,
                                      const std::vector<double>& grid, double fd_step) {
    if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be > 0");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("scan grid must ascend");
    DerivativeScan scan;
    scan.omegas = grid;
    scan.fd_step = fd_step;
    scan.values.resize(grid.size());
    scan.second_derivative.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const auto f = stencil(grid[i], fd_step);
        for (double v : f) {
            if (!std::isfinite(v)) throw std::runtime_error("derivative scan: non-finite value at omega = " + std::to_string(grid[i]));
        }
        scan.values[i] = f[1];
        scan.second_derivative[i] = (f[2] - 2.0 * f[1] + f[0]) / (fd_step * fd_step);
    });
    return scan;
}

DerivativeScan second_derivative_scan(const std::function<double(double)>& f, const std::vector<double>& grid,
                                      double fd_step) {
    return second_derivative_scan(
        [&f](double w, double d) { return std::array<double, 3>{f(w - d), f(w), f(w + d)}; }, grid, fd_step);
}

PeakLocation locate_peak(const std::vector<double>& omegas, const std::vector<double>& values, PeakSide side) {
    if (omegas.size() != values.size() || omegas.size() < 3) throw std::invalid_argument("locate_peak needs >= 3 matching samples");
    const double sgn = side == PeakSide::Positive ? 1.0 : -1.0;
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (sgn * values[i] > sgn * values[best]) best = i;
    }
    if (best == 0 || best + 1 == values.size()) {
        throw std::runtime_error("peak on scan boundary at omega = " + std::to_string(omegas[best]) + "; widen the scan");
    }
    const double x0 = omegas[best - 1], x1 = omegas[best], x2 = omegas[best + 1];
    const double y0 = values[best - 1], y1 = values[best], y2 = values[best + 1];
    // Vertex of the parabola through the three points (non-uniform spacing allowed).
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    PeakLocation peak{x1, y1, best};
    if (curvature != 0.0) {
        const double vertex = std::clamp(0.5 * (x0 + x1) - d01 / (2.0 * curvature), x0, x2);
        peak.omega = vertex;
        peak.height = y0 + d01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1);
    }
    return peak;
}

PeakLocation locate_peak(const DerivativeScan& scan, PeakSide side) {
    return locate_peak(scan.omegas, scan.second_derivative, side);
}

Prominence peak_prominence(const std::vector<double>& values, std::size_t peak_index, PeakSide side, int exclusion,
                           double threshold) {
    if (peak_index >= values.size()) throw std::invalid_argument("peak index out of range");
    const double sgn = side == PeakSide::Positive ? 1.0 : -1.0;
    const auto n = static_cast<long>(values.size());
    const long window = exclusion > 0 ? exclusion : std::max<long>(2, n / 10);
    std::vector<double> background;
    for (long i = 0; i < n; ++i) {
        if (std::abs(i - static_cast<long>(peak_index)) > window) background.push_back(sgn * values[static_cast<std::size_t>(i)]);
    }
    if (background.size() < 2) throw std::invalid_argument("scan too short to estimate a background");
    const double mean = std::accumulate(background.begin(), background.end(), 0.0) / background.size();
    double var = 0.0;
    for (double b : background) var += (b - mean) * (b - mean);
    var /= static_cast<double>(background.size() - 1);
    Prominence p;
    p.height = sgn * values[peak_index] - mean;
    p.background_std = std::sqrt(var);
    p.ratio = p.background_std > 0.0 ? p.height / p.background_std : (p.height > 0.0 ? INFINITY : 0.0);
    p.resolved = p.ratio >= threshold;
    return p;
}

PeakLocation refine_peak(const std::function<double(double)>& f, double lo, double hi, int coarse_points, PeakSide side) {
    if (!(hi > lo) || coarse_points < 3) throw std::invalid_argument("refine_peak needs hi > lo and >= 3 points");
    const double sgn = side == PeakSide::Positive ? 1.0 : -1.0;
    std::vector<double> xs(static_cast<std::size_t>(coarse_points)), ys(xs.size());
    for (int i = 0; i < coarse_points; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (coarse_points - 1);
    parallel_for(xs.size(), [&](std::size_t i) { ys[i] = f(xs[i]); });
    const PeakLocation coarse = locate_peak(xs, ys, side);
    const auto [x, fx] = boost::math::tools::brent_find_minima(
        [&](double w) { return -sgn * f(w); }, xs[coarse.index - 1], xs[coarse.index + 1], 50);
    return {x, -sgn * fx, coarse.index};
}

ScalingFit fit_power_law(const std::vector<double>& sizes, const std::vector<double>& offsets, std::size_t min_sizes) {
    if (sizes.size() != offsets.size()) throw std::invalid_argument("fit_power_law: size/offset count mismatch");
    if (sizes.size() < min_sizes) throw std::invalid_argument("fit_power_law needs at least " + std::to_string(min_sizes) + " sizes");
    const auto n = static_cast<double>(sizes.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!(offsets[i] > 0.0) || !(sizes[i] > 0.0)) throw std::invalid_argument("fit_power_law: offsets and sizes must be > 0");
        const double x = std::log(sizes[i]), y = std::log(offsets[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    ScalingFit fit;
    fit.n_values = sizes;
    fit.offsets = offsets;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.prefactor = std::exp(intercept);
    double rss = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double r = std::log(offsets[i]) - intercept - fit.exponent * std::log(sizes[i]);
        rss += r * r;
    }
    fit.exponent_stderr = sizes.size() > 2 ? std::sqrt(rss / (n - 2.0) / (sxx - sx * sx / n)) : 0.0;
    const auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
    fit.window = {*mn, *mx};
    return fit;
}

AveragedTable disorder_average(const std::vector<ScanTable>& realizations) {
    if (realizations.empty()) throw std::invalid_argument("disorder_average needs at least one realization");
    const ScanTable& first = realizations.front();
    for (const auto& r : realizations) {
        if (r.omegas != first.omegas || r.orders != first.orders || r.values.rows() != first.values.rows() ||
            r.values.cols() != first.values.cols()) {
            throw std::invalid_argument("disorder_average: realization grids differ");
        }
    }
    const auto count = static_cast<double>(realizations.size());
    AveragedTable out;
    out.mean = first;
    out.mean.values.setZero();
    for (const auto& r : realizations) out.mean.values += r.values;
    out.mean.values /= count;
    out.standard_error = Eigen::MatrixXd::Zero(first.values.rows(), first.values.cols());
    if (realizations.size() > 1) {
        for (const auto& r : realizations) out.standard_error += (r.values - out.mean.values).cwiseAbs2();
        out.standard_error = (out.standard_error / (count - 1.0) / count).cwiseSqrt();
    }
    return out;
}

std::size_t grid_argmax(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("grid_argmax of an empty array");
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace mqc::analysis
