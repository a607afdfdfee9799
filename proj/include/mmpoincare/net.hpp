#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmpoincare/cloud.hpp"
#include "mmpoincare/graph.hpp"
#include "mmpoincare/rng.hpp"

namespace mmp {

/// Discretization parameters: separation scale and the seed of the greedy
/// selection order. Seed 0 keeps the cloud's index order; any other seed
/// shuffles the pass, exposing order sensitivity. The same (cloud, config)
/// always yields the same net.
struct NetConfig {
    double epsilon = 0.1;
    std::uint64_t ordering_seed = 0;

    void validate() const {
        if (!(epsilon > 0.0)) throw std::invalid_argument("NetConfig: epsilon must be positive");
    }
};

namespace detail {

inline std::vector<double> distances_from_source(const PointCloud& cloud, std::size_t source) {
    return cloud.distances_from_all(source);
}

} // namespace detail

/// Greedy maximal eps-separated subset: a seed-shuffled pass over the cloud,
/// keeping each point at distance >= eps from everything kept so far. The
/// result is eps-separated and every cloud point lies within < eps of it.
/// Returned indices are sorted ascending.
inline std::vector<std::size_t> build_net(const PointCloud& cloud, const NetConfig& cfg) {
    cfg.validate();
    std::vector<std::size_t> order(cloud.size());
    std::iota(order.begin(), order.end(), 0);
    if (cfg.ordering_seed != 0) {
        Rng rng = Rng(cfg.ordering_seed).split("net-order");
        rng.shuffle(order);
    }
    std::vector<char> chosen(cloud.size(), 0);
    std::vector<std::size_t> net;
    for (std::size_t candidate : order) {
        bool separated = true;
        cloud.for_each_within(candidate, cfg.epsilon, [&](std::size_t z, double d) {
            if (chosen[z] && d < cfg.epsilon) separated = false;
        });
        if (separated) {
            chosen[candidate] = 1;
            net.push_back(candidate);
        }
    }
    std::sort(net.begin(), net.end());
    return net;
}

/// Brute-force audit of the separation/covering duality of a net.
struct NetAudit {
    double min_separation = std::numeric_limits<double>::infinity();
    double covering_radius = 0.0;
    bool separated = false;
    bool covering = false;
};

inline NetAudit audit_net(const PointCloud& cloud, std::span<const std::size_t> net,
                          double epsilon) {
    NetAudit audit;
    std::vector<char> in_net(cloud.size(), 0);
    for (std::size_t z : net) in_net[z] = 1;
    // pairwise separation: only distances up to 2 eps can matter
    for (std::size_t i = 0; i < net.size(); ++i)
        cloud.for_each_within(net[i], 2.0 * epsilon, [&](std::size_t z, double d) {
            if (in_net[z] && z != net[i])
                audit.min_separation = std::min(audit.min_separation, d);
        });
    const auto to_net = cloud.distances_to_set(net);
    for (double d : to_net) audit.covering_radius = std::max(audit.covering_radius, d);
    audit.separated = audit.min_separation >= epsilon;
    audit.covering = audit.covering_radius < epsilon;
    return audit;
}

/// Graph structure on a net: vertices are the net points, an edge joins two
/// of them when their distance is strictly below 2*eps, and each vertex
/// carries the weight of the cloud points strictly within eps of it.
/// A disconnected result is a construction error naming the components.
inline MMGraph net_graph(const PointCloud& cloud, std::span<const std::size_t> net,
                         const NetConfig& cfg) {
    cfg.validate();
    if (net.empty()) throw std::invalid_argument("net_graph: empty net");
    const std::size_t n = net.size();
    std::vector<std::int64_t> net_index(cloud.size(), -1);
    for (std::size_t i = 0; i < n; ++i) net_index[net[i]] = static_cast<std::int64_t>(i);
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<double> measure(n, 0.0);
    std::vector<std::array<double, 2>> coords(n, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        cloud.for_each_within(net[i], 2.0 * cfg.epsilon, [&](std::size_t z, double d) {
            const std::int64_t j = net_index[z];
            if (j > static_cast<std::int64_t>(i) && d > 0.0 && d < 2.0 * cfg.epsilon)
                edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j)});
            if (d < cfg.epsilon) measure[i] += cloud.weights()[z];
        });
        const auto pt = cloud.point(net[i]);
        coords[i] = {pt[0], cloud.dim() > 1 ? pt[1] : 0.0};
    }
    for (double m : measure)
        if (!(m > 0.0))
            throw std::runtime_error("net_graph: a net point has an empty eps-ball; "
                                     "the net does not cover its own sample");
    // Component census first, so the connectivity error can name sizes.
    {
        std::vector<std::vector<VertexId>> adj(n);
        for (auto [a, b] : edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::vector<int> comp(n, -1);
        int n_comp = 0;
        std::vector<std::size_t> sizes;
        for (std::size_t s = 0; s < n; ++s) {
            if (comp[s] >= 0) continue;
            std::vector<VertexId> stack{static_cast<VertexId>(s)};
            comp[s] = n_comp;
            std::size_t size = 0;
            while (!stack.empty()) {
                VertexId v = stack.back();
                stack.pop_back();
                ++size;
                for (VertexId w : adj[v])
                    if (comp[w] < 0) {
                        comp[w] = n_comp;
                        stack.push_back(w);
                    }
            }
            sizes.push_back(size);
            ++n_comp;
        }
        if (n_comp > 1) {
            std::string msg = "net_graph: net graph is disconnected (" +
                              std::to_string(n_comp) + " components, sizes";
            for (std::size_t s : sizes) msg += " " + std::to_string(s);
            throw std::runtime_error(msg + ")");
        }
    }
    MMGraph g = MMGraph::from_edges(n, edges, std::move(measure),
                                    "net(eps=" + std::to_string(cfg.epsilon) + ")");
    g.set_coordinates(std::move(coords));
    return g;
}

/// Covering multiplicity witnessed by the sample: the largest number of
/// other net points whose r-balls meet a given one, i.e. with distance
/// strictly below 2r.
inline int covering_multiplicity(const PointCloud& cloud, std::span<const std::size_t> net,
                                 double r) {
    if (!(r > 0.0)) throw std::invalid_argument("covering_multiplicity: r must be positive");
    std::vector<char> in_net(cloud.size(), 0);
    for (std::size_t z : net) in_net[z] = 1;
    int worst = 0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        int count = 0;
        cloud.for_each_within(net[i], 2.0 * r, [&](std::size_t z, double d) {
            if (in_net[z] && z != net[i] && d < 2.0 * r) ++count;
        });
        worst = std::max(worst, count);
    }
    return worst;
}

/// Fitted rough-isometry constants between a graph (X, scale * hop metric,
/// mu) and a cloud (Y, metric, weights), under the vertex -> cloud-point map
/// phi. c1 is the covering radius of the image set, c2 the smallest affine
/// distortion over the sampled pairs, c3 the smallest mass-comparability
/// constant of c1-balls over the sampled centers.
struct RoughIsometryCert {
    double c1 = 0.0;
    double c2 = 1.0;
    double c3 = 1.0;
    std::size_t sampled_pairs = 0;
    bool pass = false;
};

inline RoughIsometryCert rough_isometry_check(const PointCloud& cloud, const MMGraph& g,
                                              std::span<const std::size_t> phi,
                                              std::size_t pair_budget, std::uint64_t seed,
                                              double graph_scale = 1.0) {
    if (pair_budget == 0) throw std::invalid_argument("rough_isometry_check: pair_budget is zero");
    if (phi.size() != g.vertex_count())
        throw std::invalid_argument("rough_isometry_check: phi must map every vertex");
    if (!(graph_scale > 0.0))
        throw std::invalid_argument("rough_isometry_check: graph_scale must be positive");
    RoughIsometryCert cert;

    // Image covering radius: every cloud point against the nearest image.
    const auto to_images = cloud.distances_to_set(phi);
    for (double d : to_images) cert.c1 = std::max(cert.c1, d);

    Rng rng = Rng(seed).split("rough-isometry");
    const std::size_t n = g.vertex_count();
    const std::size_t targets_per_source = std::min<std::size_t>(8, n - 1);
    const std::size_t n_sources =
        std::min(n, (pair_budget + targets_per_source - 1) / targets_per_source);

    bool degenerate = false;
    double c2 = 1.0;
    for (std::size_t s = 0; s < n_sources; ++s) {
        const auto x = static_cast<VertexId>(n_sources == n ? s : rng.below(n));
        const auto hop = bfs_distances(g, x);
        for (std::size_t t = 0; t < targets_per_source; ++t) {
            auto y = static_cast<VertexId>(rng.below(n));
            if (y == x) continue;
            const double rho = graph_scale * static_cast<double>(hop[y]);
            const double d = cloud.distance_from(phi[x], phi[y]);
            ++cert.sampled_pairs;
            c2 = std::max(c2, d / (rho + cert.c1));
            if (d > 0.0)
                c2 = std::max(c2, (rho - cert.c1) / d);
            else if (rho > cert.c1)
                degenerate = true; // distinct images collapsed beyond the c1 allowance
        }
    }
    cert.c2 = c2;

    double c3 = 1.0;
    const std::size_t n_centers = std::min<std::size_t>(64, n);
    const int hop_radius = static_cast<int>(std::floor(cert.c1 / graph_scale));
    for (std::size_t s = 0; s < n_centers; ++s) {
        const auto x = static_cast<VertexId>(n_centers == n ? s : rng.below(n));
        const auto b = ball(g, x, static_cast<double>(hop_radius));
        double cloud_mass = 0.0;
        cloud.for_each_within(phi[x], cert.c1,
                              [&](std::size_t z, double) { cloud_mass += cloud.weights()[z]; });
        if (!(cloud_mass > 0.0) || !(b.total_mass > 0.0)) {
            degenerate = true;
            continue;
        }
        c3 = std::max({c3, b.total_mass / cloud_mass, cloud_mass / b.total_mass});
    }
    cert.c3 = c3;
    cert.pass = !degenerate && std::isfinite(cert.c1) && std::isfinite(cert.c2) &&
                std::isfinite(cert.c3);
    return cert;
}

/// Ball-average transfer of a sampled function onto the net: the weighted
/// mean of psi over the cloud points strictly within eps of each net point.
inline ScalarField smooth_field(const PointCloud& cloud, std::span<const double> psi,
                                std::span<const std::size_t> net, const NetConfig& cfg) {
    cfg.validate();
    if (psi.size() != cloud.size())
        throw std::invalid_argument("smooth_field: psi must be defined on every cloud point");
    ScalarField out(net.size(), 0.0);
    for (std::size_t i = 0; i < net.size(); ++i) {
        double mass = 0.0, acc = 0.0;
        cloud.for_each_within(net[i], cfg.epsilon, [&](std::size_t z, double d) {
            if (d < cfg.epsilon) {
                mass += cloud.weights()[z];
                acc += cloud.weights()[z] * psi[z];
            }
        });
        if (!(mass > 0.0))
            throw std::runtime_error("smooth_field: empty eps-ball at a net point "
                                     "(covering violated)");
        out[i] = acc / mass;
    }
    return out;
}

/// A sampled test function together with its analytic gradient magnitude,
/// both per cloud point. Gradients come from the space generator; nothing is
/// differentiated numerically.
struct TestFieldOnCloud {
    std::vector<double> values;
    std::vector<double> gradient;
};

/// Empirical constants of the smoothing-gradient comparison
///   ||delta psi~||_{sigma, B(x,R)} <= T ||grad psi||_{sigma, B(x, T' R)}
/// where the left norm runs over net points within metric distance R of x
/// (net-graph measure) and the right over cloud points within T' R (weights).
struct SmoothingConstants {
    double T_emp = 0.0;
    double Tprime_emp = 0.0;
    bool satisfied = false;
    // worst instance: the binding (or infeasible) field/center/radius triple
    std::size_t worst_field = 0;
    std::size_t worst_center = 0;
    double worst_radius = 0.0;
    double worst_lhs = 0.0;
    double worst_rhs = 0.0;
};

inline SmoothingConstants smoothing_gradient_bound(const PointCloud& cloud, const MMGraph& g,
                                                   std::span<const std::size_t> net,
                                                   const NetConfig& cfg,
                                                   std::span<const TestFieldOnCloud> fields,
                                                   double sigma, std::span<const double> radii) {
    cfg.validate();
    if (sigma < 1.0) throw std::invalid_argument("smoothing_gradient_bound: sigma must be >= 1");
    if (net.size() != g.vertex_count())
        throw std::invalid_argument("smoothing_gradient_bound: graph is not the net's graph");
    if (fields.empty() || radii.empty())
        throw std::invalid_argument("smoothing_gradient_bound: need fields and radii");
    for (double R : radii)
        if (!(R > 0.0)) throw std::invalid_argument("smoothing_gradient_bound: radii must be positive");

    // Graph-side gradient of each smoothed field, once.
    std::vector<std::vector<double>> delta(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
        if (fields[f].values.size() != cloud.size() || fields[f].gradient.size() != cloud.size())
            throw std::invalid_argument("smoothing_gradient_bound: field size mismatch");
        const auto smoothed = smooth_field(cloud, fields[f].values, net, cfg);
        delta[f] = gradient_lengths(g, smoothed);
    }

    const double anchor = 1.0 + 6.0 * cfg.epsilon;
    const double grid[2] = {anchor, 2.0 * anchor};

    SmoothingConstants out;
    for (double tprime : grid) {
        double T = 0.0;
        bool feasible = true;
        SmoothingConstants probe;
        probe.Tprime_emp = tprime;
        for (std::size_t c = 0; c < net.size() && feasible; ++c) {
            const auto dist = detail::distances_from_source(cloud, net[c]);
            for (double R : radii) {
                for (std::size_t f = 0; f < fields.size(); ++f) {
                    double lhs_acc = 0.0;
                    for (std::size_t j = 0; j < net.size(); ++j)
                        if (dist[net[j]] <= R)
                            lhs_acc += std::pow(delta[f][j], sigma) * g.measure(static_cast<VertexId>(j));
                    double rhs_acc = 0.0;
                    for (std::size_t z = 0; z < cloud.size(); ++z)
                        if (dist[z] <= tprime * R)
                            rhs_acc += std::pow(fields[f].gradient[z], sigma) * cloud.weights()[z];
                    const double lhs = std::pow(lhs_acc, 1.0 / sigma);
                    const double rhs = std::pow(rhs_acc, 1.0 / sigma);
                    if (rhs == 0.0) {
                        if (lhs > 0.0) {
                            feasible = false;
                            probe.worst_field = f;
                            probe.worst_center = c;
                            probe.worst_radius = R;
                            probe.worst_lhs = lhs;
                            probe.worst_rhs = 0.0;
                        }
                        continue;
                    }
                    const double ratio = lhs / rhs;
                    if (ratio > T) {
                        T = ratio;
                        probe.worst_field = f;
                        probe.worst_center = c;
                        probe.worst_radius = R;
                        probe.worst_lhs = lhs;
                        probe.worst_rhs = rhs;
                    }
                }
                if (!feasible) break;
            }
        }
        if (feasible) {
            out = probe;
            out.T_emp = T;
            out.satisfied = true;
            return out;
        }
        out = probe; // keep the last infeasibility witness
    }
    out.satisfied = false;
    return out;
}

} // namespace mmp
