#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mqc/core.hpp"

namespace mqc::analysis {

/// I_m = (1/K) sum_j F(phi_j) exp(i m phi_j) for |m| <= m_max.
/// The curve must sit on the uniform grid 2 pi j / K with K >= 2 m_max + 1
/// (std::invalid_argument otherwise). For TrueEcho and Analytic kinds the
/// spectrum invariants are enforced against F(0) and violations throw.
MqcSpectrum intensities_from_fotoc(const FotocCurve& curve, int m_max, SpectrumKind kind = SpectrumKind::TrueEcho);

/// sum_m I_m exp(-i m phi) at each phi.
std::vector<Complex> resynthesize(const MqcSpectrum& spectrum, const std::vector<double>& phis);

/// sqrt(sum m^2 I_m) over the real parts.
double spectrum_width(const MqcSpectrum& spectrum);
/// 2 sum m^2 |I_m|.
double qfi_lower_bound(const MqcSpectrum& spectrum);

struct DerivativeScan {
    std::vector<double> omegas;
    std::vector<double> values;             // f(omega)
    std::vector<double> second_derivative;  // (f(+d) - 2 f + f(-d)) / d^2
    double fd_step = 1e-4;
};

inline constexpr double kDefaultFdStep = 1e-4;

/// Central second differences of f at every grid point. Grid points are
/// evaluated in parallel; each point owns its output slot.
DerivativeScan second_derivative_scan(const std::function<double(double)>& f, const std::vector<double>& grid,
                                      double fd_step = kDefaultFdStep);

/// Same, with a stencil evaluator returning {f(w - d), f(w), f(w + d)} so callers
/// can share work (e.g. warm starts) between the three points.
DerivativeScan second_derivative_scan(const std::function<std::array<double, 3>(double, double)>& stencil,
                                      const std::vector<double>& grid, double fd_step = kDefaultFdStep);

/// Which extremum of the second derivative to look for.
enum class PeakSide { Positive, Negative };

struct PeakLocation {
    double omega = 0.0;
    double height = 0.0;  // interpolated extremum value
    std::size_t index = 0;
};

/// Grid extremum refined by a parabola through the three surrounding points.
/// std::runtime_error if the extremum sits on the grid boundary.
PeakLocation locate_peak(const DerivativeScan& scan, PeakSide side = PeakSide::Positive);
PeakLocation locate_peak(const std::vector<double>& omegas, const std::vector<double>& values,
                         PeakSide side = PeakSide::Positive);

struct Prominence {
    double height = 0.0;          // peak minus background mean
    double background_std = 0.0;  // over points away from the peak
    double ratio = 0.0;
    bool resolved = false;        // ratio >= threshold
};

inline constexpr double kProminenceThreshold = 5.0;

/// Background excludes points within `exclusion` grid steps of the peak
/// (default: a tenth of the scan, at least 2).
Prominence peak_prominence(const std::vector<double>& values, std::size_t peak_index, PeakSide side = PeakSide::Positive,
                           int exclusion = 0, double threshold = kProminenceThreshold);

/// Peak of a smooth function on [lo, hi]: coarse grid argmax, then Brent refinement.
PeakLocation refine_peak(const std::function<double(double)>& f, double lo, double hi, int coarse_points,
                         PeakSide side = PeakSide::Positive);

struct ScalingFit {
    std::vector<double> n_values;
    std::vector<double> offsets;
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double prefactor = 0.0;
    std::pair<double, double> window{0.0, 0.0};
};

/// Least squares of log(offset) against log(N). Needs >= 4 sizes and positive data.
ScalingFit fit_power_law(const std::vector<double>& sizes, const std::vector<double>& offsets, std::size_t min_sizes = 4);

/// Values on an (omega, m) grid; rows are omegas, columns orders.
struct ScanTable {
    std::vector<double> omegas;
    std::vector<int> orders;
    Eigen::MatrixXd values;
};

struct AveragedTable {
    ScanTable mean;
    Eigen::MatrixXd standard_error;  // zero for a single realization
};

/// Arithmetic mean and standard error of the mean per cell. Grids must match exactly.
AveragedTable disorder_average(const std::vector<ScanTable>& realizations);

/// Plain grid argmax (e.g. the cusp in I_2 near the LMG transition).
std::size_t grid_argmax(const std::vector<double>& values);

}  // namespace mqc::analysis
