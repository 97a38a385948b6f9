#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mqc/analysis.hpp"
#include "mqc/core.hpp"
#include "mqc/pipelines.hpp"

namespace mqc::jobs {

using Json = nlohmann::ordered_json;

enum class JobKind { GroundSpectrum, FotocCurve, Echo, PseudoEcho, LaaRamp, DerivativeScan, ScalingFit, DisorderSweep };

std::string to_string(JobKind kind);
JobKind parse_job_kind(const std::string& name);
const std::vector<JobKind>& all_job_kinds();

/// Bad configuration; `path` names the offending field (e.g. "model.n_spins").
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string path, const std::string& message);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// The run would need more memory than the budget allows.
class ResourceError : public std::runtime_error {
public:
    ResourceError(std::uint64_t required, std::uint64_t budget);
    std::uint64_t required() const noexcept { return required_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

struct ProtocolConfig {
    std::string schedule = "laa";         // "laa" or "linear"
    double omega0 = 10.0;                 // Omega(0)
    double omega_tau = 0.01;              // Omega(tau)
    std::vector<double> chi_taus{100.0};  // ramp durations chi * tau
    int steps = 0;                        // 0: max(1000, ceil(40 chi tau))
    int phi_points = 0;                   // 0: 2N + 2
};

struct AnalysisConfig {
    std::vector<double> omegas;  // explicit grid; overrides the range below when non-empty
    double omega_min = 0.1;
    double omega_max = 2.0;
    double omega_step = 0.05;
    int order = 0;               // m of the scanned intensity
    int m_max = 0;               // 0: N
    double fd_step = analysis::kDefaultFdStep;
    analysis::PeakSide peak_side = analysis::PeakSide::Positive;
    double fine_step = 0.01;     // second-stage scan around the coarse peak; 0 disables it
    int fine_halfwidth = 10;
    std::vector<int> sizes;      // scaling-fit system sizes
    int peak_points = 161;       // coarse points per size in scaling-fit
    pipelines::Solver solver = pipelines::Solver::Auto;
    double lanczos_tol = 1e-12;
};

struct JobConfig {
    JobKind job = JobKind::GroundSpectrum;
    ModelSpec model;
    ProtocolConfig protocol;
    AnalysisConfig analysis;
    int realizations = 100;  // disorder-sweep
    std::uint64_t seed = 0;
    int workers = 0;         // 0: all hardware threads
    std::vector<std::string> formats{"csv", "json"};

    std::vector<double> omega_grid() const;
};

/// Parses a config document. Unknown keys and wrong types raise ConfigError with the field path.
JobConfig config_from_json(const Json& doc);
/// Fully resolved document (every field present), as written to the manifest.
Json config_to_json(const JobConfig& config);

/// Applies "a.b.c=value" to a document. The value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(Json& doc, const std::string& assignment);

/// Memory budget in bytes from MQC_MEMORY_BUDGET (default 8 GiB). Accepts a plain
/// integer or a K/M/G suffix.
std::uint64_t memory_budget();
inline constexpr const char* kMemoryBudgetEnv = "MQC_MEMORY_BUDGET";

/// Peak state memory the job needs, in bytes.
std::uint64_t estimate_memory(const JobConfig& config);

/// Numeric column with its unit / normalization shown in the CSV header.
struct Column {
    std::string name;
    std::string unit;
    bool integer = false;
};

struct ResultTable {
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::string to_csv() const;
};

struct JobOutput {
    ResultTable results;
    std::vector<std::pair<std::string, ResultTable>> extra_tables;  // file name -> table
    Json summary = Json::object();
};

/// Runs the job with the current worker setting. Deterministic for a fixed config.
JobOutput run_job(const JobConfig& config);

/// Runs the job and writes results.csv, summary.json and manifest.json (plus any
/// extra tables) into `out_dir`. Refuses with ResourceError before any work if the
/// estimate exceeds the budget.
JobOutput run_and_write(const JobConfig& config, const std::filesystem::path& out_dir);

std::string tool_version();

struct Recipe {
    std::string name;
    std::string description;
    std::string scale;    // "fast", "ci" or "long-running"
    std::string runtime;  // rough wall time on one core
    Json config;
};

/// Named reproduction recipes.
const std::vector<Recipe>& list_jobs();
std::optional<Recipe> find_recipe(const std::string& name);

}  // namespace mqc::jobs
