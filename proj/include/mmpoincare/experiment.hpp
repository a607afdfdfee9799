#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmpoincare/graph.hpp"
#include "mmpoincare/growth.hpp"
#include "mmpoincare/io.hpp"
#include "mmpoincare/ledger.hpp"
#include "mmpoincare/net.hpp"
#include "mmpoincare/poincare.hpp"
#include "mmpoincare/spaces.hpp"

namespace mmp {

using json = nlohmann::json;

/// One batch experiment: a named space (optionally discretized through a
/// net), one named analysis with its parameters, and an output directory.
/// Sweeps are explicit lists in the parameters, never implicit ranges.
struct ExperimentConfig {
    json raw;
    std::string space_name;
    json space_params;
    bool has_net = false;
    NetConfig net;
    std::string analysis_name;
    json analysis_params;
    std::string output_dir;
    std::uint64_t seed = 0;

    static const std::vector<std::string>& known_spaces() {
        static const std::vector<std::string> names{
            "antenna", "grid", "tree", "rgg", "horosphere", "box", "tube",
            "graph-file", "cloud-file"};
        return names;
    }
    static const std::vector<std::string>& known_analyses() {
        static const std::vector<std::string> names{
            "growth", "poincare-ratio", "optimal-constant", "verify-theorem",
            "divergence", "ledger", "rough-isometry"};
        return names;
    }

    /// Parse and validate; unknown generator or analysis names are rejected
    /// before any work happens.
    static ExperimentConfig parse(const json& j) {
        ExperimentConfig cfg;
        cfg.raw = j;
        if (!j.contains("analysis") || !j["analysis"].is_object() ||
            !j["analysis"].contains("name"))
            throw std::invalid_argument("config: missing analysis.name");
        cfg.analysis_name = j["analysis"]["name"].get<std::string>();
        cfg.analysis_params = j["analysis"];
        if (std::find(known_analyses().begin(), known_analyses().end(), cfg.analysis_name) ==
            known_analyses().end())
            throw std::invalid_argument("config: unknown analysis '" + cfg.analysis_name + "'");
        if (cfg.analysis_name != "ledger") {
            if (!j.contains("space") || !j["space"].is_object() || !j["space"].contains("name"))
                throw std::invalid_argument("config: missing space.name");
            cfg.space_name = j["space"]["name"].get<std::string>();
            cfg.space_params = j["space"];
            if (std::find(known_spaces().begin(), known_spaces().end(), cfg.space_name) ==
                known_spaces().end())
                throw std::invalid_argument("config: unknown space '" + cfg.space_name + "'");
        }
        if (j.contains("net")) {
            cfg.has_net = true;
            cfg.net.epsilon = j["net"].value("epsilon", 0.1);
            cfg.net.ordering_seed = j["net"].value("ordering_seed", std::uint64_t{0});
            cfg.net.validate();
        }
        cfg.output_dir = j.value("output", std::string{});
        cfg.seed = j.value("seed", std::uint64_t{0});
        return cfg;
    }
};

/// FNV-1a over the canonical dump of the effective config. Every report row
/// is traceable to this hash; a resumed run with a different hash aborts.
inline std::uint64_t config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct ReportRow {
    std::string metric;
    std::string value;
    std::optional<bool> pass;
};

struct RunResult {
    bool all_pass = true;
    bool incomplete = false;
    std::vector<ReportRow> rows;
    json records = json::array();
    std::string csv;
    std::uint64_t hash = 0;
};

namespace detail {

/// A constructed space: a graph ready for analysis, and the cloud plus net
/// it came from when a discretization was requested.
struct BuiltSpace {
    std::unique_ptr<MMGraph> graph;
    std::unique_ptr<PointCloud> cloud;
    std::vector<std::size_t> net;
    NetConfig net_cfg;
    bool has_net = false;
    // lifted height data for tube clouds
    std::vector<double> cloud_field, cloud_field_grad;
};

inline void require_param(const json& p, const char* key) {
    if (!p.contains(key))
        throw std::invalid_argument(std::string("config: analysis parameter '") + key +
                                    "' is required");
}

inline std::vector<double> radii_list(const json& p, const char* key = "radii") {
    require_param(p, key);
    auto radii = p.at(key).get<std::vector<double>>();
    if (radii.empty()) throw std::invalid_argument("config: radii list is empty");
    return radii;
}

inline BuiltSpace build_space(const ExperimentConfig& cfg) {
    BuiltSpace built;
    const json& p = cfg.space_params;
    const std::string& name = cfg.space_name;
    if (name == "antenna") {
        built.graph = std::make_unique<MMGraph>(antenna_graph({p.value("max_radius", 32)}));
    } else if (name == "grid") {
        built.graph = std::make_unique<MMGraph>(
            grid_graph(p.value("d", 2), p.value("max_radius", 32)));
    } else if (name == "tree") {
        built.graph = std::make_unique<MMGraph>(
            tree_graph(p.value("branching", 2), p.value("depth", 10)));
    } else if (name == "rgg") {
        built.graph = std::make_unique<MMGraph>(random_geometric_graph(
            p.value("count", std::size_t{400}), p.value("radius", 0.08),
            p.value("seed", cfg.seed)));
    } else if (name == "graph-file") {
        require_param(p, "path");
        built.graph = std::make_unique<MMGraph>(read_edge_list_file(p.at("path")));
    } else if (name == "horosphere") {
        HorosphereParams hp;
        hp.n = p.value("n", 3);
        hp.curvature_scale = p.value("curvature_scale", 1.0);
        hp.height = p.value("height", 1.0);
        hp.extent = p.value("extent", 1.0);
        hp.count = p.value("count", std::size_t{1000});
        hp.seed = p.value("seed", cfg.seed);
        built.cloud = std::make_unique<PointCloud>(horosphere_cloud(hp));
    } else if (name == "box") {
        built.cloud = std::make_unique<PointCloud>(
            box_cloud(p.value("dim", std::size_t{2}), p.value("side", 1.0),
                      p.value("count", std::size_t{2000}), p.value("seed", cfg.seed)));
    } else if (name == "tube") {
        TubeSurfaceSpec ts;
        ts.tube_radius = p.value("tube_radius", 0.2);
        ts.arm_extent = p.value("arm_extent", 6);
        ts.spine_extent = p.value("spine_extent", 6);
        ts.density = p.value("density", 12.0);
        ts.seed = p.value("seed", cfg.seed);
        auto tube = tube_surface_cloud(ts);
        built.cloud = std::make_unique<PointCloud>(std::move(tube.cloud));
        built.cloud_field = std::move(tube.height);
        built.cloud_field_grad = std::move(tube.height_gradient);
    } else if (name == "cloud-file") {
        require_param(p, "path");
        auto raw = read_point_cloud_file(p.at("path"));
        const double scale = p.value("metric_scale", 1.0);
        if (scale != 1.0)
            built.cloud = std::make_unique<PointCloud>(PointCloud::scaled_euclidean(
                std::move(raw.coords), raw.dim, scale, std::move(raw.weights), "scaled-euclidean"));
        else
            built.cloud = std::make_unique<PointCloud>(PointCloud::euclidean(
                std::move(raw.coords), raw.dim, std::move(raw.weights)));
    }

    if (cfg.has_net) {
        if (!built.cloud)
            throw std::invalid_argument("config: a net requires a sampled space, not a graph");
        built.net_cfg = cfg.net;
        built.net = build_net(*built.cloud, built.net_cfg);
        built.graph = std::make_unique<MMGraph>(net_graph(*built.cloud, built.net, built.net_cfg));
        built.has_net = true;
    }
    return built;
}

/// Analysis center: explicit vertex id, or the graph's natural root
/// (truncation root when present, otherwise the coordinate-median vertex).
inline VertexId resolve_center(const MMGraph& g, const json& p) {
    if (p.contains("center") && p["center"].is_number())
        return p["center"].get<VertexId>();
    if (g.guard()) return g.guard()->root;
    if (!g.coordinates().empty()) {
        double cx = 0.0, cy = 0.0;
        for (const auto& c : g.coordinates()) {
            cx += c[0];
            cy += c[1];
        }
        cx /= static_cast<double>(g.vertex_count());
        cy /= static_cast<double>(g.vertex_count());
        VertexId best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            const auto& c = g.coordinates()[v];
            const double d = std::hypot(c[0] - cx, c[1] - cy);
            if (d < best_d) {
                best_d = d;
                best = static_cast<VertexId>(v);
            }
        }
        return best;
    }
    return 0;
}

inline ScalarField resolve_field(const BuiltSpace& built, const MMGraph& g, VertexId center,
                                 const std::string& name, std::uint64_t seed) {
    if (name == "coordinate:0") return coordinate_field(g, 0);
    if (name == "coordinate:1") return coordinate_field(g, 1);
    if (name == "distance") {
        auto dist = bfs_distances(g, center);
        ScalarField u(g.vertex_count());
        for (std::size_t v = 0; v < g.vertex_count(); ++v) u[v] = static_cast<double>(dist[v]);
        return u;
    }
    if (name == "random") {
        Rng rng = Rng(seed).split("field");
        ScalarField u(g.vertex_count());
        for (double& x : u) x = rng.normal();
        return u;
    }
    if (name == "smoothed-height") {
        if (!built.has_net || built.cloud_field.empty())
            throw std::invalid_argument(
                "config: field 'smoothed-height' needs a tube space with a net");
        return smooth_field(*built.cloud, built.cloud_field, built.net, built.net_cfg);
    }
    throw std::invalid_argument("config: unknown field '" + name + "'");
}

inline std::string fmt_bool(bool b) { return b ? "true" : "false"; }

} // namespace detail

/// Execute one experiment. Returns rows, analysis records, and the CSV
/// mirror; all_pass reflects every pass/fail row.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
    RunResult out;
    out.hash = config_hash(cfg.raw);
    const json& p = cfg.analysis_params;

    if (cfg.analysis_name == "ledger") {
        LedgerInputs in;
        in.n = p.value("n", 2);
        in.kappa = p.value("kappa", 0.0);
        in.epsilon = p.value("epsilon", 1.0);
        in.sigma = p.value("sigma", 1.0);
        in.beta = p.value("beta", 1.0);
        in.r0 = p.value("r0", 1.0);
        in.r1 = p.value("r1", 1.0);
        in.v_prime = p.value("v_prime", 1.0);
        in.C_prime = p.value("C_prime", 3.0);
        in.T = p.value("T", 1.0);
        if (p.contains("T")) in.T_source = "config";
        if (p.contains("T_prime")) {
            in.Tprime = p["T_prime"].get<double>();
            in.Tprime_source = "config";
        }
        auto L = constant_ledger(in);
        const std::pair<const char*, double> fields[] = {
            {"M_eps", L.M_eps}, {"R1", L.R1},       {"C1", L.C1}, {"C2", L.C2},
            {"C3", L.C3},       {"C_graph", L.C_graph}, {"C4", L.C4}, {"C5", L.C5},
            {"K1", L.K1},       {"K2", L.K2},       {"K", L.K},   {"C_dprime", L.C_dprime},
            {"T", L.in.T},      {"T_prime", L.in.Tprime}};
        CsvWriter csv({"constant", "value"});
        for (auto [name, value] : fields) {
            out.rows.push_back({name, format_double(value), std::nullopt});
            csv.add_row({name, format_double(value)});
            out.records.push_back({{"constant", name}, {"value", value}});
        }
        const bool ok = verify_ledger(L);
        out.rows.push_back({"recomputation_exact", detail::fmt_bool(ok), ok});
        out.all_pass = ok;
        out.csv = csv.str();
        return out;
    }

    auto built = detail::build_space(cfg);

    if (cfg.analysis_name == "rough-isometry") {
        if (!built.has_net)
            throw std::invalid_argument("config: rough-isometry analysis needs a net");
        auto cert = rough_isometry_check(*built.cloud, *built.graph, built.net,
                                         p.value("pair_budget", std::size_t{256}),
                                         p.value("seed", cfg.seed), built.net_cfg.epsilon);
        CsvWriter csv({"constant", "value"});
        out.rows.push_back({"c1", format_double(cert.c1), std::nullopt});
        out.rows.push_back({"c2", format_double(cert.c2), std::nullopt});
        out.rows.push_back({"c3", format_double(cert.c3), std::nullopt});
        out.rows.push_back({"sampled_pairs", std::to_string(cert.sampled_pairs), std::nullopt});
        out.rows.push_back({"pass", detail::fmt_bool(cert.pass), cert.pass});
        bool ok = cert.pass;
        if (p.contains("max_c2")) {
            const bool c2_ok = cert.c2 <= p["max_c2"].get<double>();
            out.rows.push_back({"c2_within_bound", detail::fmt_bool(c2_ok), c2_ok});
            ok = ok && c2_ok;
        }
        csv.add_row({"c1", format_double(cert.c1)});
        csv.add_row({"c2", format_double(cert.c2)});
        csv.add_row({"c3", format_double(cert.c3)});
        out.records.push_back({{"c1", cert.c1},
                               {"c2", cert.c2},
                               {"c3", cert.c3},
                               {"sampled_pairs", cert.sampled_pairs},
                               {"pass", cert.pass}});
        out.all_pass = ok;
        out.csv = csv.str();
        return out;
    }

    MMGraph& g = *built.graph;
    const VertexId center = detail::resolve_center(g, p);

    if (cfg.analysis_name == "growth") {
        auto radii = detail::radii_list(p);
        auto curve = volume_curve(g, center, radii);
        detail::require_param(p, "fit_range");
        const auto range = p["fit_range"].get<std::vector<double>>();
        if (range.size() != 2) throw std::invalid_argument("config: fit_range must be [lo, hi]");
        auto fit = fit_growth(curve, range[0], range[1]);
        CsvWriter csv({"R", "volume", "alpha_hat", "v_prime", "class"});
        for (std::size_t i = 0; i < curve.radii.size(); ++i) {
            csv.add_row({format_double(curve.radii[i]), format_double(curve.volumes[i]),
                         format_double(fit.alpha_hat), format_double(fit.v_prime),
                         to_string(fit.growth_class)});
            out.records.push_back({{"R", curve.radii[i]}, {"volume", curve.volumes[i]}});
        }
        out.rows.push_back({"alpha_hat", format_double(fit.alpha_hat), std::nullopt});
        out.rows.push_back({"v_prime", format_double(fit.v_prime), std::nullopt});
        out.rows.push_back({"R0_prime", format_double(fit.R0_prime), std::nullopt});
        out.rows.push_back({"residual", format_double(fit.residual), std::nullopt});
        out.rows.push_back({"class", to_string(fit.growth_class), std::nullopt});
        if (p.contains("expect_alpha")) {
            const auto band = p["expect_alpha"].get<std::vector<double>>();
            const bool ok = band.size() == 2 && fit.alpha_hat >= band[0] && fit.alpha_hat <= band[1];
            out.rows.push_back({"alpha_in_band", detail::fmt_bool(ok), ok});
            out.all_pass = out.all_pass && ok;
        }
        if (p.contains("expect_class")) {
            const bool ok = to_string(fit.growth_class) == p["expect_class"].get<std::string>();
            out.rows.push_back({"class_matches", detail::fmt_bool(ok), ok});
            out.all_pass = out.all_pass && ok;
        }
        out.csv = csv.str();
        return out;
    }

    if (cfg.analysis_name == "poincare-ratio" || cfg.analysis_name == "divergence") {
        PoincareConfig pc;
        pc.sigma = p.value("sigma", 1.0);
        pc.beta = p.value("beta", 1.0);
        pc.outer_factor = p.value("outer_factor", 3.0);
        pc.r0 = p.value("r0", 1.0);
        auto radii = detail::radii_list(p);
        auto u = detail::resolve_field(built, g, center, p.value("field", "coordinate:1"),
                                       cfg.seed);
        CsvWriter csv({"R", "numerator", "denominator", "ratio", "infinite"});
        std::vector<RatioRecord> records;
        if (cfg.analysis_name == "divergence") {
            detail::require_param(p, "alpha");
            auto probe = divergence_probe(g, u, center, radii, pc, p["alpha"].get<double>());
            records = probe.records;
            out.rows.push_back({"slope", format_double(probe.slope), std::nullopt});
            out.rows.push_back({"expected_gap", format_double(probe.expected_gap), std::nullopt});
            if (probe.expected_gap > 0.0) {
                out.rows.push_back({"diverges", detail::fmt_bool(probe.diverges), probe.diverges});
                out.all_pass = out.all_pass && probe.diverges;
            } else {
                out.rows.push_back({"diverges", detail::fmt_bool(probe.diverges), std::nullopt});
            }
        } else {
            records = poincare_ratio_curve(g, u, center, radii, pc);
        }
        for (const auto& rec : records) {
            csv.add_row({format_double(rec.radius), format_double(rec.numerator),
                         format_double(rec.denominator), format_double(rec.ratio),
                         detail::fmt_bool(rec.infinite)});
            out.records.push_back({{"R", rec.radius},
                                   {"numerator", rec.numerator},
                                   {"denominator", rec.denominator},
                                   {"ratio", rec.ratio},
                                   {"infinite", rec.infinite}});
        }
        out.csv = csv.str();
        return out;
    }

    if (cfg.analysis_name == "optimal-constant") {
        detail::require_param(p, "R");
        const double R = p["R"].get<double>();
        const double outer = p.value("outer_factor", 3.0);
        const std::string method = p.value("method", "quadratic");
        OptimalConstantResult res;
        if (method == "quadratic") {
            res = optimal_constant_quadratic(g, center, R, outer);
        } else if (method == "search") {
            PoincareConfig pc;
            pc.sigma = p.value("sigma", 2.0);
            pc.beta = p.value("beta", 0.0);
            pc.outer_factor = outer;
            pc.r0 = std::min(R, p.value("r0", 1.0));
            res = optimal_constant_search(g, center, R, pc,
                                          p.value("iters", std::size_t{300}),
                                          p.value("seed", cfg.seed));
        } else {
            throw std::invalid_argument("config: unknown optimal-constant method '" + method + "'");
        }
        CsvWriter csv({"metric", "value"});
        csv.add_row({"value", format_double(res.value)});
        csv.add_row({"method", to_string(res.method)});
        out.rows.push_back({"value", format_double(res.value), std::nullopt});
        out.rows.push_back({"method", to_string(res.method), std::nullopt});
        out.records.push_back({{"value", res.value}, {"method", to_string(res.method)}});
        out.csv = csv.str();
        return out;
    }

    if (cfg.analysis_name == "verify-theorem") {
        auto fit_radii = detail::radii_list(p, "fit_radii");
        detail::require_param(p, "fit_range");
        const auto range = p["fit_range"].get<std::vector<double>>();
        auto fit = fit_growth(volume_curve(g, center, fit_radii), range[0], range[1]);
        auto test_radii = detail::radii_list(p, "test_radii");
        const auto sigmas = p.value("sigmas", std::vector<double>{1.0, 2.0});
        const auto n_fields = p.value("fields", std::size_t{50});
        CsvWriter csv({"R", "sigma", "min_margin", "pass"});
        bool all_ok = true;
        Rng rng = Rng(cfg.seed).split("verify-theorem");
        for (double R : test_radii) {
            for (double sigma : sigmas) {
                double min_margin = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < n_fields; ++k) {
                    ScalarField u(g.vertex_count());
                    for (double& x : u) x = rng.normal();
                    auto m = poincare_growth_bound(g, u, center, R, sigma, fit);
                    min_margin = std::min(min_margin, m.margin);
                }
                const bool ok = min_margin >= 0.0;
                all_ok = all_ok && ok;
                csv.add_row({format_double(R), format_double(sigma), format_double(min_margin),
                             detail::fmt_bool(ok)});
                out.records.push_back(
                    {{"R", R}, {"sigma", sigma}, {"min_margin", min_margin}, {"pass", ok}});
            }
        }
        out.rows.push_back({"alpha_hat", format_double(fit.alpha_hat), std::nullopt});
        out.rows.push_back({"v_prime", format_double(fit.v_prime), std::nullopt});
        out.rows.push_back({"margins_nonnegative", detail::fmt_bool(all_ok), all_ok});
        out.all_pass = all_ok;
        out.csv = csv.str();
        return out;
    }

    throw std::logic_error("run_experiment: unhandled analysis");
}

/// Write report.json + report.csv (byte-stable for identical configs) and a
/// separate meta.json holding the timestamp. Refuses to resume over a
/// report written from a different config.
inline void write_report(const ExperimentConfig& cfg, const RunResult& result) {
    namespace fs = std::filesystem;
    if (cfg.output_dir.empty()) throw std::invalid_argument("config: output directory not set");
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);
    const fs::path report_path = dir / "report.json";

    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(result.hash));

    if (fs::exists(report_path)) {
        std::ifstream existing(report_path);
        json old;
        existing >> old;
        if (old.value("config_hash", std::string{}) != hash_hex)
            throw std::runtime_error("write_report: output directory holds a report for a "
                                     "different config (hash mismatch); aborting");
    }

    json report;
    report["config"] = cfg.raw;
    report["config_hash"] = hash_hex;
    report["analysis"] = cfg.analysis_name;
    report["incomplete"] = result.incomplete;
    report["rows"] = json::array();
    for (const auto& row : result.rows) {
        json r{{"metric", row.metric}, {"value", row.value}};
        if (row.pass.has_value()) r["pass"] = *row.pass;
        report["rows"].push_back(r);
    }
    report["records"] = result.records;

    std::ofstream(report_path) << report.dump(2) << "\n";
    std::ofstream(dir / "report.csv") << result.csv;

    json meta;
    meta["written_at"] = []() {
        std::time_t t = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        return std::string(buf);
    }();
    meta["tool"] = "mmp";
    std::ofstream(dir / "meta.json") << meta.dump(2) << "\n";
}

} // namespace mmp
