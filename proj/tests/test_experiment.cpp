#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "mmpoincare/experiment.hpp"

using namespace mmp;
namespace fs = std::filesystem;

namespace {

json base_growth_config() {
    return json{
        {"space", {{"name", "antenna"}, {"max_radius", 96}}},
        {"analysis",
         {{"name", "growth"},
          {"radii", {1, 2, 4, 8, 16, 32, 64, 96}},
          {"fit_range", {8, 96}},
          {"expect_alpha", {1.9, 2.1}},
          {"expect_class", "polynomial"}}},
        {"seed", 7}};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mmp-test-" + std::to_string(Rng(std::random_device{}()).next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config validation") {
    SECTION("unknown space name is rejected before any work") {
        json j = base_growth_config();
        j["space"]["name"] = "moebius";
        REQUIRE_THROWS_AS(ExperimentConfig::parse(j), std::invalid_argument);
    }
    SECTION("unknown analysis name is rejected") {
        json j = base_growth_config();
        j["analysis"]["name"] = "frobnicate";
        REQUIRE_THROWS_AS(ExperimentConfig::parse(j), std::invalid_argument);
    }
    SECTION("missing analysis is rejected") {
        REQUIRE_THROWS_AS(ExperimentConfig::parse(json{{"space", {{"name", "antenna"}}}}),
                          std::invalid_argument);
    }
    SECTION("empty radii list is a parameter error") {
        json j = base_growth_config();
        j["analysis"]["radii"] = json::array();
        auto cfg = ExperimentConfig::parse(j);
        REQUIRE_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    }
}

TEST_CASE("growth experiment on the antenna") {
    auto cfg = ExperimentConfig::parse(base_growth_config());
    auto result = run_experiment(cfg);
    REQUIRE(result.all_pass);
    REQUIRE(result.csv.rfind("R,volume,alpha_hat,v_prime,class\n", 0) == 0);
    bool found_alpha = false;
    for (const auto& row : result.rows)
        if (row.metric == "alpha_hat") {
            found_alpha = true;
            const double a = std::stod(row.value);
            REQUIRE(a > 1.9);
            REQUIRE(a < 2.1);
        }
    REQUIRE(found_alpha);
}

TEST_CASE("ledger experiment") {
    json j{{"analysis",
            {{"name", "ledger"},
             {"n", 2},
             {"kappa", 0.0},
             {"epsilon", 1.0},
             {"sigma", 1.0},
             {"beta", 2.0},
             {"v_prime", 3.0},
             {"C_prime", 3.0},
             {"T_prime", 7.0}}}};
    auto result = run_experiment(ExperimentConfig::parse(j));
    REQUIRE(result.all_pass);
    bool found = false;
    for (const auto& row : result.rows)
        if (row.metric == "C_dprime") {
            found = true;
            REQUIRE(std::stod(row.value) == 89.0);
        }
    REQUIRE(found);
}

TEST_CASE("divergence experiment affirms the subcritical exponent") {
    json j{{"space", {{"name", "antenna"}, {"max_radius", 128}}},
           {"analysis",
            {{"name", "divergence"},
             {"sigma", 1.0},
             {"beta", 1.0},
             {"alpha", 2.0},
             {"outer_factor", 1.0},
             {"field", "coordinate:1"},
             {"radii", {8, 16, 32, 64, 128}}}}};
    auto result = run_experiment(ExperimentConfig::parse(j));
    REQUIRE(result.all_pass);
}

TEST_CASE("poincare-ratio experiment reproduces the height-field record") {
    json j{{"space", {{"name", "antenna"}, {"max_radius", 33}}},
           {"analysis",
            {{"name", "poincare-ratio"},
             {"sigma", 1.0},
             {"beta", 0.0},
             {"outer_factor", 1.0},
             {"field", "coordinate:1"},
             {"radii", {10}}}}};
    auto result = run_experiment(ExperimentConfig::parse(j));
    REQUIRE(result.records.size() == 1);
    REQUIRE(result.records[0]["numerator"].get<double>() == Catch::Approx(770.0));
}

TEST_CASE("optimal-constant experiment through a graph file") {
    TempDir tmp;
    const auto graph_path = (tmp.path / "p3.graph").string();
    std::ofstream(graph_path) << "vertices 3\n0 1\n1 2\n";
    json j{{"space", {{"name", "graph-file"}, {"path", graph_path}}},
           {"analysis",
            {{"name", "optimal-constant"},
             {"method", "quadratic"},
             {"R", 1.0},
             {"outer_factor", 1.0},
             {"center", 1}}}};
    auto result = run_experiment(ExperimentConfig::parse(j));
    REQUIRE(std::stod(result.rows[0].value) == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("verify-theorem experiment") {
    json j{{"space", {{"name", "rgg"}, {"count", 300}, {"radius", 0.08}, {"seed", 5}}},
           {"analysis",
            {{"name", "verify-theorem"},
             {"fit_radii", {1, 2, 3, 4, 5, 6, 7, 8}},
             {"fit_range", {2, 8}},
             {"test_radii", {2, 4, 6}},
             {"sigmas", {1.0, 2.0}},
             {"fields", 30}}},
           {"seed", 12}};
    auto result = run_experiment(ExperimentConfig::parse(j));
    REQUIRE(result.all_pass);
}

TEST_CASE("rough-isometry experiment needs and uses a net") {
    json j{{"space", {{"name", "box"}, {"dim", 2}, {"side", 1.0}, {"count", 3000}, {"seed", 4}}},
           {"net", {{"epsilon", 0.08}, {"ordering_seed", 1}}},
           {"analysis", {{"name", "rough-isometry"}, {"pair_budget", 200}, {"max_c2", 4.0}}},
           {"seed", 9}};
    auto result = run_experiment(ExperimentConfig::parse(j));
    REQUIRE(result.all_pass);

    json no_net = j;
    no_net.erase("net");
    REQUIRE_THROWS_AS(run_experiment(ExperimentConfig::parse(no_net)), std::invalid_argument);
}

TEST_CASE("reports are byte-stable and hash-guarded") {
    TempDir tmp;
    json j = base_growth_config();
    j["space"]["max_radius"] = 48;
    j["analysis"]["radii"] = {1, 2, 4, 8, 16, 32, 48};
    j["analysis"]["fit_range"] = {4, 48};
    j["output"] = (tmp.path / "exp").string();
    auto cfg = ExperimentConfig::parse(j);
    auto result = run_experiment(cfg);
    write_report(cfg, result);

    const auto report_path = tmp.path / "exp" / "report.json";
    const auto csv_path = tmp.path / "exp" / "report.csv";
    REQUIRE(fs::exists(report_path));
    REQUIRE(fs::exists(csv_path));
    REQUIRE(fs::exists(tmp.path / "exp" / "meta.json"));

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string report_one = slurp(report_path);
    const std::string csv_one = slurp(csv_path);

    // identical config: byte-identical bodies
    auto again = run_experiment(cfg);
    write_report(cfg, again);
    REQUIRE(slurp(report_path) == report_one);
    REQUIRE(slurp(csv_path) == csv_one);

    // changed config into the same directory: abort
    json changed = j;
    changed["seed"] = 8;
    auto cfg2 = ExperimentConfig::parse(changed);
    auto result2 = run_experiment(cfg2);
    REQUIRE_THROWS_AS(write_report(cfg2, result2), std::runtime_error);

    // row hashes differ between configs
    REQUIRE(result.hash != result2.hash);
}
