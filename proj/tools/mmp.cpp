// mmp: batch experiment runner for metric measured graphs and discrete
// Poincare-type inequalities.
//
//   mmp run <config.json>... [--output DIR] [--seed N] [--jobs N]
//   mmp verify <suite>
//   mmp formats

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "mmpoincare/experiment.hpp"
#include "mmpoincare/verify.hpp"

namespace {

struct RunSummary {
    std::string path;
    bool ok = false;
    std::string message;
};

RunSummary run_one(const std::string& path, const std::string& output_override,
                   bool seed_overridden, std::uint64_t seed) {
    RunSummary summary;
    summary.path = path;
    try {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        mmp::json j;
        in >> j;
        if (seed_overridden) j["seed"] = seed;
        if (!output_override.empty()) j["output"] = output_override;
        auto cfg = mmp::ExperimentConfig::parse(j);
        auto result = mmp::run_experiment(cfg);
        if (!cfg.output_dir.empty()) mmp::write_report(cfg, result);
        summary.ok = result.all_pass;
        std::ostringstream msg;
        msg << cfg.analysis_name << ": " << (result.all_pass ? "pass" : "FAIL");
        for (const auto& row : result.rows)
            if (row.pass.has_value()) msg << "  [" << row.metric << "=" << row.value << "]";
        if (!cfg.output_dir.empty()) msg << "  -> " << cfg.output_dir;
        summary.message = msg.str();
    } catch (const std::exception& e) {
        summary.ok = false;
        summary.message = std::string("error: ") + e.what();
    }
    return summary;
}

void print_formats() {
    std::cout <<
        R"(edge-list graph format (text, '#' comments):
    vertices N
    i j            one line per undirected edge, 0-based ids
    measure        optional block
    i mu           one line per vertex, positive masses

point-cloud format (text, '#' comments):
    weighted       optional flag line; selects a trailing weight column
    x y [z ...] [w]  one point per line, whitespace-separated coordinates

experiment config (JSON):
    {
      "space":    {"name": "antenna|grid|tree|rgg|horosphere|box|tube|graph-file|cloud-file", ...},
      "net":      {"epsilon": 0.1, "ordering_seed": 0},          // optional discretization
      "analysis": {"name": "growth|poincare-ratio|optimal-constant|verify-theorem|divergence|ledger|rough-isometry", ...},
      "output":   "out/experiment-1",
      "seed":     42
    }

report files (per experiment, under the output directory):
    report.json    config echo, config hash, rows, per-record payload
    report.csv     analysis-specific mirror; growth uses columns R,volume,alpha_hat,v_prime,class
    meta.json      timestamp only, so report bodies stay byte-stable
)";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"metric-measured-graph discretization and Poincare-inequality toolkit"};
    app.require_subcommand(1);

    std::vector<std::string> config_paths;
    std::string output_override;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    auto* run_cmd = app.add_subcommand("run", "run experiments from JSON configs");
    run_cmd->add_option("configs", config_paths, "experiment config files")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--output", output_override, "override the output directory");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the config seed");
    run_cmd->add_option("--jobs", jobs, "independent experiments run concurrently")
        ->check(CLI::PositiveNumber);

    std::string suite;
    auto* verify_cmd = app.add_subcommand("verify", "run an acceptance suite");
    verify_cmd->add_option("suite", suite, "antenna|theorem|net|spectral|horosphere|all")
        ->required();

    auto* formats_cmd = app.add_subcommand("formats", "print the file formats");

    CLI11_PARSE(app, argc, argv);

    if (formats_cmd->parsed()) {
        print_formats();
        return 0;
    }

    if (verify_cmd->parsed()) {
        try {
            return mmp::verify::run_suite(suite, std::cout) ? 0 : 1;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    // run: independent experiments, optionally in parallel; output serialized
    if (config_paths.size() > 1 && !output_override.empty()) {
        std::cerr << "error: --output cannot override several configs at once\n";
        return 2;
    }
    std::vector<RunSummary> summaries(config_paths.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < config_paths.size(); i = next.fetch_add(1))
            summaries[i] = run_one(config_paths[i], output_override, seed_opt->count() > 0, seed);
    };
    const unsigned n_threads = std::min<unsigned>(jobs, config_paths.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    bool all_ok = true;
    for (const auto& s : summaries) {
        std::cout << s.path << ": " << s.message << "\n";
        all_ok = all_ok && s.ok;
    }
    return all_ok ? 0 : 1;
}
