#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mqc/jobs.hpp"
#include "mqc/parallel.hpp"

using namespace mqc;
using namespace mqc::jobs;

namespace {

std::string config_error_path(const Json& doc) {
    try {
        config_from_json(doc);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<none>";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct ScopedEnv {
    ScopedEnv(const char* name, const char* value) : name_(name) {
        if (const char* old = std::getenv(name)) old_ = old;
        ::setenv(name, value, 1);
    }
    ~ScopedEnv() {
        if (old_.empty()) ::unsetenv(name_);
        else ::setenv(name_, old_.c_str(), 1);
    }
    const char* name_;
    std::string old_;
};

}  // namespace

TEST_SUITE("jobs") {

TEST_CASE("config parsing with defaults") {
    const auto c = config_from_json(Json::parse(R"({"job": "ground-spectrum", "model": {"kind": "LMG", "n_spins": 40}})"));
    CHECK(c.job == JobKind::GroundSpectrum);
    CHECK(c.model.model == ModelKind::LMG);
    CHECK(c.model.n_spins == 40);
    CHECK(c.analysis.fd_step == 1e-4);
    CHECK(c.omega_grid().size() == 39);
    // Round trip through the resolved document.
    const auto again = config_from_json(config_to_json(c));
    CHECK(config_to_json(again) == config_to_json(c));
}

TEST_CASE("config errors name the offending field") {
    CHECK(config_error_path(Json::parse(R"({"job": "ground-spectrum", "model": {"n_spinz": 4}})")) == "model.n_spinz");
    CHECK(config_error_path(Json::parse(R"({"job": "nope"})")) == "job");
    CHECK(config_error_path(Json::parse(R"({"job": "echo", "model": {"n_spins": "ten"}})")) == "model.n_spins");
    CHECK(config_error_path(Json::parse(R"({"job": "echo", "protocol": {"chi_taus": [10, -1]}})")) == "protocol.chi_taus[1]");
    CHECK(config_error_path(Json::parse(R"({"job": "echo", "model": {"kind": "XYZ"}})")) == "model.kind");
    CHECK(config_error_path(Json::parse(R"({"job": "echo", "model": {"kind": "TFI", "n_spins": 40}})")) == "model");
    CHECK(config_error_path(Json::parse(R"({"job": "echo", "extra": 1})")) == "extra");
    CHECK(config_error_path(Json::parse(R"({"job": "echo", "analysis": {"peak_side": "up"}})")) == "analysis.peak_side");
    CHECK(config_error_path(Json::parse(R"({"job": "echo", "seed": -3})")) == "seed");
    try {
        config_from_json(Json::parse(R"({"job": "ground-spectrum", "model": {"n_spinz": 4}})"));
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()) == "model.n_spinz: unknown field");
    }
}

TEST_CASE("overrides") {
    Json doc = Json::parse(R"({"job": "echo", "model": {"n_spins": 8}})");
    apply_override(doc, "model.n_spins=12");
    apply_override(doc, "model.kind=LMG");
    apply_override(doc, "protocol.chi_taus=[3, 10]");
    CHECK(doc["model"]["n_spins"] == 12);
    CHECK(doc["model"]["kind"] == "LMG");
    CHECK(doc["protocol"]["chi_taus"].size() == 2);
    CHECK_THROWS_AS(apply_override(doc, "novalue"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "model..x=1"), ConfigError);
}

TEST_CASE("memory budget") {
    {
        ScopedEnv env(kMemoryBudgetEnv, "2K");
        CHECK(memory_budget() == 2048);
    }
    {
        ScopedEnv env(kMemoryBudgetEnv, "3G");
        CHECK(memory_budget() == (std::uint64_t{3} << 30));
    }
    {
        ScopedEnv env(kMemoryBudgetEnv, "lots");
        CHECK_THROWS_AS(memory_budget(), ConfigError);
    }
    auto c = config_from_json(Json::parse(R"({"job": "echo", "model": {"kind": "TFI", "n_spins": 20}})"));
    CHECK(estimate_memory(c) > (std::uint64_t{1} << 20) * 16 * 42);
    ScopedEnv env(kMemoryBudgetEnv, "1M");
    const auto dir = std::filesystem::temp_directory_path() / "mqc_refusal_test";
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(run_and_write(c, dir), ResourceError);
    CHECK_FALSE(std::filesystem::exists(dir));
}

TEST_CASE("CSV headers carry units and numbers round-trip") {
    ResultTable t;
    t.columns = {{"omega_over_chi", "Omega/chi"}, {"m", "order", true}, {"I_m", "sum over m, normalized"}};
    t.add_row({0.1, 2.0, 1.0 / 3.0});
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("omega_over_chi [Omega/chi],m [order],\"I_m [sum over m, normalized]\"\n", 0) == 0);
    CHECK(csv.find(",2,") != std::string::npos);
    const auto last = csv.substr(csv.rfind(',') + 1);
    CHECK(std::stod(last) == 1.0 / 3.0);
    CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("jobs are deterministic across worker counts") {
    Json doc = find_recipe("figS5-rfti-n12")->config;
    apply_override(doc, "disorder.realizations=2");
    apply_override(doc, "model.n_spins=8");
    apply_override(doc, "analysis.omega_step=0.08");
    apply_override(doc, "seed=99");
    const auto c = config_from_json(doc);
    const int saved = worker_count();
    set_worker_count(1);
    const auto a = run_job(c);
    set_worker_count(3);
    const auto b = run_job(c);
    set_worker_count(saved);
    CHECK(a.results.to_csv() == b.results.to_csv());
    CHECK(a.summary.dump() == b.summary.dump());
}

TEST_CASE("ground-spectrum job writes all outputs") {
    auto c = config_from_json(Json::parse(
        R"({"job": "ground-spectrum", "model": {"kind": "TFI", "n_spins": 10}, "analysis": {"omegas": [0.5, 1.0, 2.0]}})"));
    const auto dir = std::filesystem::temp_directory_path() / "mqc_job_test";
    std::filesystem::remove_all(dir);
    const auto out = run_and_write(c, dir);
    CHECK(out.results.rows.size() == 3 * 21);
    CHECK(std::filesystem::exists(dir / "results.csv"));
    const auto manifest = Json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["config"]["model"]["n_spins"] == 10);
    CHECK(manifest["version"] == tool_version());
    CHECK(manifest["seeds"]["base"] == 0);
    const auto summary = Json::parse(slurp(dir / "summary.json"));
    for (const auto& p : summary["points"]) CHECK(p["sum_rule"].get<double>() == doctest::Approx(1.0));
    std::filesystem::remove_all(dir);
}

TEST_CASE("recipes parse") {
    CHECK(list_jobs().size() >= 10);
    for (const auto& r : list_jobs()) {
        CAPTURE(r.name);
        CHECK_NOTHROW(config_from_json(r.config));
        CHECK((r.scale == "fast" || r.scale == "ci" || r.scale == "long-running"));
    }
    CHECK_FALSE(find_recipe("does-not-exist").has_value());
}

}
