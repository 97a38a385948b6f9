// mqc-echo: configuration-driven runner for the MQC echo experiments.
//
// Precedence (later wins): recipe defaults, --config file, --set overrides, --seed / --workers.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "mqc/jobs.hpp"
#include "mqc/parallel.hpp"

namespace {

using mqc::jobs::Json;

constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

void merge(Json& base, const Json& overlay) {
    for (const auto& [key, value] : overlay.items()) {
        if (value.is_object() && base.contains(key) && base[key].is_object()) {
            merge(base[key], value);
        } else {
            base[key] = value;
        }
    }
}

void print_catalog() {
    std::cout << "jobs:";
    for (auto kind : mqc::jobs::all_job_kinds()) std::cout << ' ' << mqc::jobs::to_string(kind);
    std::cout << "\n\nrecipes (run with: mqc-echo <recipe> --out <dir>):\n";
    for (const auto& r : mqc::jobs::list_jobs()) {
        std::cout << "  " << r.name << "  [" << r.scale << ", " << r.runtime << "]\n      " << r.description << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiple-quantum-coherence echo simulations", "mqc-echo"};
    app.set_version_flag("--version", mqc::jobs::tool_version());
    std::string job;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool print_config = false;
    app.add_option("job", job, "job kind, recipe name, or 'list'")->required();
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--set", overrides, "override a field, e.g. model.n_spins=12 (repeatable)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "base RNG seed");
    app.add_option("--workers", workers, "worker threads (0: all hardware threads)")->check(CLI::NonNegativeNumber);
    app.add_flag("--print-config", print_config, "print the resolved config and exit");
    app.footer(std::string("Environment: ") + mqc::jobs::kMemoryBudgetEnv +
               " caps the estimated state memory in bytes (K/M/G suffixes allowed; default 8G).");
    CLI11_PARSE(app, argc, argv);

    if (job == "list") {
        print_catalog();
        return 0;
    }

    try {
        Json doc = Json::object();
        if (auto recipe = mqc::jobs::find_recipe(job)) {
            doc = recipe->config;
        } else {
            doc["job"] = mqc::jobs::to_string(mqc::jobs::parse_job_kind(job));
        }
        const std::string job_kind = doc["job"];
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            Json file = Json::parse(in, nullptr, false);
            if (file.is_discarded() || !file.is_object()) throw mqc::jobs::ConfigError("--config", "not a JSON object: " + config_path);
            if (file.contains("job") && file["job"] != job_kind) {
                throw mqc::jobs::ConfigError("job", "config file says '" + file["job"].dump() + "' but the command line asks for " + job_kind);
            }
            merge(doc, file);
        }
        for (const auto& o : overrides) mqc::jobs::apply_override(doc, o);
        if (seed) doc["seed"] = *seed;
        if (workers) doc["workers"] = *workers;

        const mqc::jobs::JobConfig config = mqc::jobs::config_from_json(doc);
        if (print_config) {
            std::cout << mqc::jobs::config_to_json(config).dump(2) << '\n';
            return 0;
        }
        if (out_dir.empty()) throw mqc::jobs::ConfigError("--out", "output directory is required");
        mqc::set_worker_count(config.workers > 0 ? config.workers : static_cast<int>(std::thread::hardware_concurrency()));

        const auto t0 = std::chrono::steady_clock::now();
        mqc::jobs::run_and_write(config, out_dir);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "mqc-echo: " << mqc::jobs::to_string(config.job) << " finished in " << seconds << " s, wrote " << out_dir << '\n';
        return 0;
    } catch (const mqc::jobs::ConfigError& e) {
        std::cerr << "mqc-echo: config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const mqc::jobs::ResourceError& e) {
        std::cerr << "mqc-echo: refused: " << e.what() << '\n';
        return kExitResource;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mqc-echo: invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "mqc-echo: error: " << e.what() << '\n';
        return 1;
    }
}
