#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmp {

using VertexId = std::uint32_t;

/// Returned by distance queries for unreachable pairs. Cannot occur on a
/// connected graph; kept so callers can stay defensive.
constexpr int kUnreachable = -1;

/// Marks the radius around a root vertex inside which the graph is a faithful
/// piece of the (infinite) space it truncates. Operations that enlarge balls
/// check against it so clipped mass is an error, never a silent undercount.
struct TruncationGuard {
    VertexId root = 0;
    double radius = 0.0;
};

/// Finite metric measured graph: unit-length edges, combinatorial metric,
/// one positive mass per vertex. Immutable after construction; all queries
/// are read-only.
class MMGraph {
public:
    /// Build from an undirected edge list. Self-loops are rejected, duplicate
    /// edges collapsed. `measure` may be empty (counting measure). The graph
    /// must come out connected.
    static MMGraph from_edges(std::size_t vertex_count,
                              const std::vector<std::pair<VertexId, VertexId>>& edges,
                              std::vector<double> measure = {},
                              std::string label = {}) {
        std::vector<std::uint32_t> degree(vertex_count, 0);
        for (auto [a, b] : edges) {
            if (a >= vertex_count || b >= vertex_count)
                throw std::invalid_argument("MMGraph: edge endpoint out of range");
            if (a == b) throw std::invalid_argument("MMGraph: self-loop rejected");
            ++degree[a];
            ++degree[b];
        }
        MMGraph g;
        g.offsets_.assign(vertex_count + 1, 0);
        for (std::size_t v = 0; v < vertex_count; ++v)
            g.offsets_[v + 1] = g.offsets_[v] + degree[v];
        g.neighbors_.resize(g.offsets_[vertex_count]);
        std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (auto [a, b] : edges) {
            g.neighbors_[cursor[a]++] = b;
            g.neighbors_[cursor[b]++] = a;
        }
        // Canonical order, then drop duplicates in place.
        std::uint64_t write = 0;
        std::vector<std::uint64_t> new_offsets(vertex_count + 1, 0);
        for (std::size_t v = 0; v < vertex_count; ++v) {
            auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
            auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
            std::sort(first, last);
            auto unique_last = std::unique(first, last);
            for (auto it = first; it != unique_last; ++it) g.neighbors_[write++] = *it;
            new_offsets[v + 1] = write;
        }
        g.neighbors_.resize(write);
        g.offsets_ = std::move(new_offsets);
        g.finish_construction(std::move(measure), std::move(label));
        return g;
    }

    /// Build directly from a CSR adjacency (generators use this to avoid the
    /// edge-list detour). Neighbor lists must already be symmetric, sorted,
    /// and irreflexive; this is verified.
    static MMGraph from_csr(std::vector<std::uint64_t> offsets,
                            std::vector<VertexId> neighbors,
                            std::vector<double> measure = {},
                            std::string label = {}) {
        MMGraph g;
        g.offsets_ = std::move(offsets);
        g.neighbors_ = std::move(neighbors);
        if (g.offsets_.empty() || g.offsets_.front() != 0 || g.offsets_.back() != g.neighbors_.size())
            throw std::invalid_argument("MMGraph: malformed CSR offsets");
        g.verify_symmetry();
        g.finish_construction(std::move(measure), std::move(label));
        return g;
    }

    std::size_t vertex_count() const { return offsets_.size() - 1; }
    std::size_t edge_count() const { return neighbors_.size() / 2; }

    std::span<const VertexId> neighbors(VertexId v) const {
        return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
    }
    std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

    double measure(VertexId v) const { return measure_[v]; }
    const std::vector<double>& measures() const { return measure_; }
    double total_measure() const { return total_measure_; }

    const std::string& label() const { return label_; }

    /// Optional per-vertex coordinates attached by generators (model-space
    /// units). Empty when the graph has no geometric origin.
    const std::vector<std::array<double, 2>>& coordinates() const { return coords_; }
    void set_coordinates(std::vector<std::array<double, 2>> coords) {
        if (!coords.empty() && coords.size() != vertex_count())
            throw std::invalid_argument("MMGraph: coordinate count mismatch");
        coords_ = std::move(coords);
    }

    const std::optional<TruncationGuard>& guard() const { return guard_; }
    void set_guard(TruncationGuard g) { guard_ = g; }

    void check_vertex(VertexId v) const {
        if (v >= vertex_count()) throw std::invalid_argument("MMGraph: vertex id out of range");
    }

private:
    MMGraph() = default;

    void verify_symmetry() const {
        for (std::size_t v = 0; v < vertex_count(); ++v) {
            for (VertexId w : neighbors(static_cast<VertexId>(v))) {
                if (w >= vertex_count())
                    throw std::invalid_argument("MMGraph: neighbor id out of range");
                if (w == v) throw std::invalid_argument("MMGraph: self-loop rejected");
                auto ns = neighbors(w);
                if (!std::binary_search(ns.begin(), ns.end(), static_cast<VertexId>(v)))
                    throw std::invalid_argument("MMGraph: adjacency is not symmetric");
            }
        }
    }

    void finish_construction(std::vector<double> measure, std::string label) {
        const std::size_t n = vertex_count();
        if (n == 0) throw std::invalid_argument("MMGraph: empty vertex set");
        if (measure.empty()) measure.assign(n, 1.0);
        if (measure.size() != n)
            throw std::invalid_argument("MMGraph: measure length must equal vertex count");
        for (double m : measure)
            if (!(m > 0.0)) throw std::invalid_argument("MMGraph: vertex measure must be positive");
        measure_ = std::move(measure);
        total_measure_ = 0.0;
        for (double m : measure_) total_measure_ += m;
        label_ = std::move(label);

        // Connectivity: disconnected input is a construction error.
        std::vector<char> seen(n, 0);
        std::vector<VertexId> queue{0};
        seen[0] = 1;
        std::size_t reached = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (VertexId w : neighbors(queue[head])) {
                if (!seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    queue.push_back(w);
                }
            }
        }
        if (reached != n)
            throw std::invalid_argument("MMGraph: graph is disconnected (" +
                                        std::to_string(reached) + " of " + std::to_string(n) +
                                        " vertices reachable from vertex 0)");
    }

    std::vector<std::uint64_t> offsets_;
    std::vector<VertexId> neighbors_;
    std::vector<double> measure_;
    double total_measure_ = 0.0;
    std::string label_;
    std::vector<std::array<double, 2>> coords_;
    std::optional<TruncationGuard> guard_;
};

/// One real value per vertex of some graph.
using ScalarField = std::vector<double>;

/// Closed combinatorial ball: members = { x : dist(center,x) <= radius }.
struct Ball {
    VertexId center = 0;
    double radius = 0.0;
    std::vector<VertexId> members;
    double total_mass = 0.0;
};

/// BFS distances from `source`; vertices beyond `max_radius` (when >= 0) stay
/// at kUnreachable.
inline std::vector<int> bfs_distances(const MMGraph& g, VertexId source, int max_radius = -1) {
    g.check_vertex(source);
    std::vector<int> dist(g.vertex_count(), kUnreachable);
    std::vector<VertexId> queue;
    queue.reserve(g.vertex_count());
    dist[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        VertexId v = queue[head];
        if (max_radius >= 0 && dist[v] >= max_radius) continue;
        for (VertexId w : g.neighbors(v)) {
            if (dist[w] == kUnreachable) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

/// Minimum edge count over paths x -> y (kUnreachable if none).
inline int shortest_path_distance(const MMGraph& g, VertexId x, VertexId y) {
    g.check_vertex(x);
    g.check_vertex(y);
    if (x == y) return 0;
    std::vector<int> dist(g.vertex_count(), kUnreachable);
    std::vector<VertexId> queue;
    dist[x] = 0;
    queue.push_back(x);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        VertexId v = queue[head];
        for (VertexId w : g.neighbors(v)) {
            if (dist[w] == kUnreachable) {
                dist[w] = dist[v] + 1;
                if (w == y) return dist[w];
                queue.push_back(w);
            }
        }
    }
    return kUnreachable;
}

/// Closed ball around `center`. Members come back sorted by vertex id.
inline Ball ball(const MMGraph& g, VertexId center, double radius) {
    g.check_vertex(center);
    if (radius < 0.0) throw std::invalid_argument("ball: radius must be non-negative");
    const int hop_radius = static_cast<int>(std::floor(radius));
    auto dist = bfs_distances(g, center, hop_radius);
    Ball b;
    b.center = center;
    b.radius = radius;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (dist[v] != kUnreachable && dist[v] <= hop_radius) {
            b.members.push_back(static_cast<VertexId>(v));
            b.total_mass += g.measure(static_cast<VertexId>(v));
        }
    }
    return b;
}

inline void check_field(const MMGraph& g, const ScalarField& u) {
    if (u.size() != g.vertex_count())
        throw std::invalid_argument("ScalarField: length must equal vertex count");
}

/// mu-weighted average of u over the ball.
inline double field_average(const MMGraph& g, const ScalarField& u, const Ball& b) {
    check_field(g, u);
    if (b.members.empty()) throw std::domain_error("field_average: empty ball");
    double acc = 0.0;
    for (VertexId v : b.members) acc += g.measure(v) * u[v];
    return acc / b.total_mass;
}

/// Length of the discrete gradient at x: (sum over neighbors of |u(y)-u(x)|^2)^{1/2}.
inline double gradient_length(const MMGraph& g, const ScalarField& u, VertexId x) {
    g.check_vertex(x);
    check_field(g, u);
    double acc = 0.0;
    for (VertexId y : g.neighbors(x)) {
        const double d = u[y] - u[x];
        acc += d * d;
    }
    return std::sqrt(acc);
}

/// Discrete gradient length at every vertex.
inline std::vector<double> gradient_lengths(const MMGraph& g, const ScalarField& u) {
    check_field(g, u);
    std::vector<double> out(g.vertex_count());
    for (std::size_t x = 0; x < g.vertex_count(); ++x)
        out[x] = gradient_length(g, u, static_cast<VertexId>(x));
    return out;
}

/// Weighted sigma-norm over a vertex set: (sum_S |u|^sigma mu)^{1/sigma}, sigma >= 1.
inline double lp_norm_on_set(const MMGraph& g, const ScalarField& u,
                             std::span<const VertexId> set, double sigma) {
    check_field(g, u);
    if (sigma < 1.0) throw std::invalid_argument("lp_norm_on_set: sigma must be >= 1");
    double acc = 0.0;
    for (VertexId v : set) {
        g.check_vertex(v);
        acc += std::pow(std::abs(u[v]), sigma) * g.measure(v);
    }
    return std::pow(acc, 1.0 / sigma);
}

/// True when B(center, radius) is certified complete by the graph's
/// truncation guard (or the graph is untruncated, i.e. it is the whole space).
inline bool ball_is_complete(const MMGraph& g, VertexId center, double radius) {
    if (!g.guard()) return true;
    const auto& guard = *g.guard();
    const int d = shortest_path_distance(g, guard.root, center);
    return d != kUnreachable && static_cast<double>(d) + radius <= guard.radius;
}

} // namespace mmp
