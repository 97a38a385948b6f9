#pragma once

#include <array>
#include <vector>

#include "mqc/analysis.hpp"
#include "mqc/core.hpp"

namespace mqc::pipelines {

enum class Solver {
    Auto,      // Analytic for TFI, Exact otherwise
    Analytic,  // free-fermion product formula (TFI only)
    Exact,     // dense Dicke solve (LMG) or Lanczos (lattice)
};

Solver parse_solver(const std::string& name);
std::string to_string(Solver solver);

struct GroundOptions {
    Solver solver = Solver::Auto;
    double lanczos_tol = 1e-10;
};

/// Exact ground state (Dicke or bitstring) at spec.omega.
StateVector ground_state(const ModelSpec& spec, double lanczos_tol = 1e-10);

/// True MQC spectrum w.r.t. S_x of the ground state at spec.omega, orders |m| <= N.
MqcSpectrum ground_spectrum(const ModelSpec& spec, const GroundOptions& options = {});

/// 2<|S_z|>/N of the exact ground state.
double ground_order_parameter(const ModelSpec& spec, double lanczos_tol = 1e-10);

/// I_m of the ground state at omega - d, omega, omega + d. Lattice models warm-start
/// the outer points from the centre vector.
std::array<double, 3> intensity_stencil(const ModelSpec& spec, int m, double omega, double d,
                                        const GroundOptions& options = {});

/// d^2 I_m / d omega^2 on a grid (central differences with step fd_step).
analysis::DerivativeScan intensity_scan(const ModelSpec& spec, int m, const std::vector<double>& grid,
                                        double fd_step = analysis::kDefaultFdStep, const GroundOptions& options = {});

/// Evenly spaced points lo, lo + step, ... up to hi (inclusive within step / 1000).
std::vector<double> linear_grid(double lo, double hi, double step);

/// Two-stage peak search: coarse grid over [lo, hi], then a fine grid of
/// 2 * fine_halfwidth + 1 points at fine_step around the coarse extremum.
struct PeakSearch {
    double lo = 0.3;
    double hi = 2.0;
    double coarse_step = 0.05;
    double fine_step = 0.01;
    int fine_halfwidth = 10;
    analysis::PeakSide side = analysis::PeakSide::Positive;
    double fd_step = analysis::kDefaultFdStep;
};

struct PeakSearchResult {
    analysis::DerivativeScan coarse;
    analysis::DerivativeScan fine;
    analysis::PeakLocation peak;
    analysis::Prominence prominence;  // of the peak within the coarse scan
};

PeakSearchResult search_peak(const ModelSpec& spec, int m, const PeakSearch& search, const GroundOptions& options = {});

/// Peak of d^2 I_m / d omega^2 for a smooth (analytic or dense) pipeline:
/// coarse grid of `points` over [lo, hi] followed by Brent refinement.
analysis::PeakLocation smooth_peak(const ModelSpec& spec, int m, double lo, double hi, int points,
                                   analysis::PeakSide side = analysis::PeakSide::Positive,
                                   double fd_step = analysis::kDefaultFdStep);

/// Scan window used for finite-size peaks: [1 - 3 / N^(1/2), 1 + 1 / N^(1/2)].
std::pair<double, double> lmg_peak_window(int n_spins);
/// [1 - 3 / N, 1 + 1 / N].
std::pair<double, double> tfi_peak_window(int n_spins);

struct SizePeak {
    int n_spins = 0;
    analysis::PeakLocation peak;
    double offset = 0.0;  // 1 - omega*/chi
};

/// Peak of d^2 I_m / d omega^2 per size. TFI uses the analytic second derivative,
/// LMG finite differences of dense ground states.
std::vector<SizePeak> finite_size_peaks(ModelKind model, int m, const std::vector<int>& sizes, int points = 161,
                                        double fd_step = analysis::kDefaultFdStep);

/// Disorder-averaged d^2 I_0 / d omega^2 for RFTI, one realization per seed index.
struct DisorderSweep {
    analysis::AveragedTable values;      // I_0 per (omega, realization-mean)
    analysis::AveragedTable curvature;   // d^2 I_0 / d omega^2
    std::vector<std::uint64_t> seeds;
    analysis::PeakLocation peak;
    analysis::Prominence prominence;
    bool peak_found = false;             // false when the extremum sits on the boundary
};

DisorderSweep disorder_sweep(const ModelSpec& spec, const std::vector<double>& grid, int realizations,
                             std::uint64_t base_seed, double fd_step = analysis::kDefaultFdStep,
                             double lanczos_tol = 1e-12);

}  // namespace mqc::pipelines
