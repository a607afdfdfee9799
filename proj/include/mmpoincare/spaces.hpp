#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmpoincare/cloud.hpp"
#include "mmpoincare/graph.hpp"
#include "mmpoincare/rng.hpp"

namespace mmp {

// ---------------------------------------------------------------------------
// Antenna graph: an infinite spine {m=0} with a full horizontal row at every
// integer height, truncated to the diamond |m|+|n| <= max_radius. Quadratic
// ball growth with a one-dimensional gradient support makes it the reference
// sharpness example for the Poincare ratio probes.
// ---------------------------------------------------------------------------

struct AntennaSpec {
    /// Diamond truncation radius. Keep it >= 3x the largest ball radius any
    /// analysis will request, so enlarged balls are never clipped; the
    /// truncation guard turns violations into errors.
    int max_radius = 0;
};

namespace detail {

/// Indexer for diamond-truncated row graphs: rows n in [-T, T], row n holding
/// m in [-(T-|n|), T-|n|].
class DiamondIndex {
public:
    explicit DiamondIndex(int T) : T_(T), row_offset_(2 * T + 2, 0) {
        for (int n = -T; n <= T; ++n)
            row_offset_[n + T + 1] = row_offset_[n + T] + row_width(n);
    }
    int truncation() const { return T_; }
    int row_width(int n) const { return 2 * (T_ - std::abs(n)) + 1; }
    bool contains(int m, int n) const { return std::abs(m) + std::abs(n) <= T_; }
    std::uint64_t index(int m, int n) const {
        return row_offset_[n + T_] + static_cast<std::uint64_t>(m + (T_ - std::abs(n)));
    }
    std::uint64_t vertex_count() const { return row_offset_.back(); }

private:
    int T_;
    std::vector<std::uint64_t> row_offset_;
};

} // namespace detail

inline MMGraph antenna_graph(const AntennaSpec& spec) {
    if (spec.max_radius < 1) throw std::invalid_argument("antenna_graph: max_radius must be >= 1");
    const int T = spec.max_radius;
    detail::DiamondIndex idx(T);
    const auto n_vertices = idx.vertex_count();
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(static_cast<std::size_t>(n_vertices) * 2);
    std::vector<std::array<double, 2>> coords(n_vertices);
    for (int n = -T; n <= T; ++n) {
        const int W = T - std::abs(n);
        for (int m = -W; m <= W; ++m) {
            const auto v = static_cast<VertexId>(idx.index(m, n));
            coords[v] = {static_cast<double>(m), static_cast<double>(n)};
            if (m < W)
                edges.push_back({v, static_cast<VertexId>(idx.index(m + 1, n))});
            // Vertical edges exist on the spine only.
            if (m == 0 && n < T)
                edges.push_back({v, static_cast<VertexId>(idx.index(0, n + 1))});
        }
    }
    MMGraph g = MMGraph::from_edges(n_vertices, edges, {}, "antenna(max_radius=" + std::to_string(T) + ")");
    g.set_coordinates(std::move(coords));
    g.set_guard({static_cast<VertexId>(idx.index(0, 0)), static_cast<double>(T)});
    return g;
}

/// Rectangular window of the same antenna pattern: rows |n| <= spine_extent,
/// each row spanning |m| <= arm_extent. Matches the tube surface footprint.
inline MMGraph antenna_graph_rect(int arm_extent, int spine_extent) {
    if (arm_extent < 1 || spine_extent < 1)
        throw std::invalid_argument("antenna_graph_rect: extents must be >= 1");
    const int A = arm_extent, S = spine_extent;
    const int row_width = 2 * A + 1;
    auto idx = [&](int m, int n) {
        return static_cast<VertexId>(static_cast<std::uint64_t>(n + S) * row_width + (m + A));
    };
    const std::size_t n_vertices = static_cast<std::size_t>(2 * S + 1) * row_width;
    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<std::array<double, 2>> coords(n_vertices);
    for (int n = -S; n <= S; ++n)
        for (int m = -A; m <= A; ++m) {
            coords[idx(m, n)] = {static_cast<double>(m), static_cast<double>(n)};
            if (m < A) edges.push_back({idx(m, n), idx(m + 1, n)});
            if (m == 0 && n < S) edges.push_back({idx(0, n), idx(0, n + 1)});
        }
    MMGraph g = MMGraph::from_edges(n_vertices, edges, {},
                                    "antenna_rect(arm=" + std::to_string(A) +
                                        ",spine=" + std::to_string(S) + ")");
    g.set_coordinates(std::move(coords));
    return g;
}

/// Closed-form volume of the antenna ball B((0,0), R) under counting measure.
inline double antenna_ball_volume(int R) {
    return 2.0 * R * static_cast<double>(R) + 2.0 * R + 1.0;
}

/// Exact reference values for the height field u(m,n) = n on the antenna,
/// ball centered at the origin. Independent of any graph construction.
struct AntennaClosedForms {
    double deviation_mass = 0.0;   ///< sum over B(0,R) of |u - u_R|^sigma (u_R = 0)
    double gradient_mass = 0.0;    ///< sum over B(0, outer*R) of (delta u)^sigma
    double integral_comparison = 0.0; ///< int_0^R (2x+1)(R-x)^sigma dx
    double ratio = 0.0;            ///< deviation_mass / (R^beta * gradient_mass)
};

inline AntennaClosedForms antenna_closed_forms(int R, double sigma, double beta,
                                               double outer_factor) {
    if (R < 1) throw std::invalid_argument("antenna_closed_forms: R must be >= 1");
    AntennaClosedForms out;
    for (int n = 1; n <= R; ++n)
        out.deviation_mass += (2.0 * (R - n) + 1.0) * std::pow(static_cast<double>(n), sigma);
    out.deviation_mass *= 2.0;
    const double spine_count = 2.0 * std::floor(outer_factor * R) + 1.0;
    out.gradient_mass = spine_count * std::pow(2.0, sigma / 2.0);
    const double N = R;
    out.integral_comparison =
        (2.0 * N + 1.0) * std::pow(N, sigma + 1.0) / (sigma + 1.0) -
        2.0 * std::pow(N, sigma + 2.0) / (sigma + 2.0);
    out.ratio = out.deviation_mass / (std::pow(N, beta) * out.gradient_mass);
    return out;
}

/// Per-vertex coordinate component as a scalar field (axis 0 or 1). The
/// antenna height field u(m,n) = n is coordinate_field(g, 1).
inline ScalarField coordinate_field(const MMGraph& g, std::size_t axis) {
    if (g.coordinates().empty())
        throw std::invalid_argument("coordinate_field: graph carries no coordinates");
    if (axis >= 2) throw std::invalid_argument("coordinate_field: axis out of range");
    ScalarField u(g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) u[v] = g.coordinates()[v][axis];
    return u;
}

// ---------------------------------------------------------------------------
// Control spaces: grids and trees.
// ---------------------------------------------------------------------------

/// Nearest-neighbor grid Z^d truncated to the l1 ball of radius max_radius,
/// counting measure. d in {1,2,3}.
inline MMGraph grid_graph(int d, int max_radius) {
    if (d < 1 || d > 3) throw std::invalid_argument("grid_graph: d must be 1, 2 or 3");
    if (max_radius < 1) throw std::invalid_argument("grid_graph: max_radius must be >= 1");
    const int T = max_radius;
    std::vector<std::pair<VertexId, VertexId>> edges;
    VertexId root = 0;
    std::size_t n_vertices = 0;
    std::vector<std::array<double, 2>> coords;

    if (d == 1) {
        n_vertices = static_cast<std::size_t>(2 * T + 1);
        coords.resize(n_vertices);
        for (int x = -T; x <= T; ++x) {
            const auto v = static_cast<VertexId>(x + T);
            coords[v] = {static_cast<double>(x), 0.0};
            if (x < T) edges.push_back({v, static_cast<VertexId>(v + 1)});
        }
        root = static_cast<VertexId>(T);
    } else if (d == 2) {
        detail::DiamondIndex idx(T);
        n_vertices = idx.vertex_count();
        coords.resize(n_vertices);
        for (int n = -T; n <= T; ++n) {
            const int W = T - std::abs(n);
            for (int m = -W; m <= W; ++m) {
                const auto v = static_cast<VertexId>(idx.index(m, n));
                coords[v] = {static_cast<double>(m), static_cast<double>(n)};
                if (idx.contains(m + 1, n))
                    edges.push_back({v, static_cast<VertexId>(idx.index(m + 1, n))});
                if (idx.contains(m, n + 1))
                    edges.push_back({v, static_cast<VertexId>(idx.index(m, n + 1))});
            }
        }
        root = static_cast<VertexId>(idx.index(0, 0));
    } else {
        // Layers z in [-T, T]; layer z is the 2D l1 ball of radius T - |z|.
        std::vector<std::uint64_t> layer_offset(2 * T + 2, 0);
        auto vol2 = [](int W) {
            return static_cast<std::uint64_t>(2 * W * static_cast<std::uint64_t>(W) + 2 * W + 1);
        };
        for (int z = -T; z <= T; ++z)
            layer_offset[z + T + 1] = layer_offset[z + T] + vol2(T - std::abs(z));
        n_vertices = layer_offset.back();
        std::vector<std::vector<std::uint64_t>> row_offsets(2 * T + 1);
        for (int z = -T; z <= T; ++z) {
            const int W = T - std::abs(z);
            auto& ro = row_offsets[z + T];
            ro.assign(2 * W + 2, 0);
            for (int y = -W; y <= W; ++y)
                ro[y + W + 1] = ro[y + W] + static_cast<std::uint64_t>(2 * (W - std::abs(y)) + 1);
        }
        auto idx3f = [&](int x, int y, int z) {
            const int W = T - std::abs(z);
            return layer_offset[z + T] + row_offsets[z + T][y + W] +
                   static_cast<std::uint64_t>(x + (W - std::abs(y)));
        };
        auto inside = [&](int x, int y, int z) {
            return std::abs(x) + std::abs(y) + std::abs(z) <= T;
        };
        for (int z = -T; z <= T; ++z) {
            const int W = T - std::abs(z);
            for (int y = -W; y <= W; ++y) {
                const int Wx = W - std::abs(y);
                for (int x = -Wx; x <= Wx; ++x) {
                    const auto v = static_cast<VertexId>(idx3f(x, y, z));
                    if (inside(x + 1, y, z))
                        edges.push_back({v, static_cast<VertexId>(idx3f(x + 1, y, z))});
                    if (inside(x, y + 1, z))
                        edges.push_back({v, static_cast<VertexId>(idx3f(x, y + 1, z))});
                    if (inside(x, y, z + 1))
                        edges.push_back({v, static_cast<VertexId>(idx3f(x, y, z + 1))});
                }
            }
        }
        root = static_cast<VertexId>(idx3f(0, 0, 0));
    }

    MMGraph g = MMGraph::from_edges(n_vertices, edges, {},
                                    "grid(d=" + std::to_string(d) + ",max_radius=" + std::to_string(T) + ")");
    if (d <= 2) g.set_coordinates(std::move(coords));
    g.set_guard({root, static_cast<double>(T)});
    return g;
}

/// Complete rooted b-ary tree of the given depth, counting measure.
inline MMGraph tree_graph(int branching, int depth) {
    if (branching < 2) throw std::invalid_argument("tree_graph: branching must be >= 2");
    if (depth < 1) throw std::invalid_argument("tree_graph: depth must be >= 1");
    std::uint64_t n_vertices = 0, layer = 1;
    for (int k = 0; k <= depth; ++k) {
        n_vertices += layer;
        layer *= static_cast<std::uint64_t>(branching);
    }
    std::vector<std::pair<VertexId, VertexId>> edges;
    edges.reserve(n_vertices - 1);
    for (std::uint64_t v = 1; v < n_vertices; ++v)
        edges.push_back({static_cast<VertexId>((v - 1) / branching), static_cast<VertexId>(v)});
    MMGraph g = MMGraph::from_edges(n_vertices, edges, {},
                                    "tree(b=" + std::to_string(branching) + ",depth=" + std::to_string(depth) + ")");
    g.set_guard({0, static_cast<double>(depth)});
    return g;
}

// ---------------------------------------------------------------------------
// Sampled model spaces.
// ---------------------------------------------------------------------------

/// Horosphere in the constant-curvature half-space model. The level set at
/// the given height is intrinsically flat; its induced distance is the
/// coordinate distance scaled by 1/(curvature_scale * height).
struct HorosphereParams {
    int n = 3;                 ///< ambient dimension (horosphere has dim n-1)
    double curvature_scale = 1.0; ///< a, with sectional curvature -a^2 and a = b
    double height = 1.0;       ///< horosphere level
    double extent = 1.0;       ///< coordinate box half-width
    std::size_t count = 1000;  ///< sample size (>= 100)
    std::uint64_t seed = 0;
};

inline PointCloud horosphere_cloud(const HorosphereParams& p) {
    if (p.n < 2) throw std::invalid_argument("horosphere_cloud: ambient dimension must be >= 2");
    if (!(p.curvature_scale > 0.0))
        throw std::invalid_argument("horosphere_cloud: curvature scale must be positive");
    if (!(p.height > 0.0)) throw std::invalid_argument("horosphere_cloud: height must be positive");
    if (p.count < 100) throw std::invalid_argument("horosphere_cloud: count must be >= 100");
    const std::size_t dim = static_cast<std::size_t>(p.n - 1);
    Rng rng = Rng(p.seed).split("horosphere");
    std::vector<double> coords(p.count * dim);
    for (double& c : coords) c = rng.uniform(-p.extent, p.extent);
    const double scale = 1.0 / (p.curvature_scale * p.height);
    // Uniform weights summing to the induced volume of the box.
    const double induced_volume = std::pow(2.0 * p.extent * scale, static_cast<double>(dim));
    std::vector<double> weights(p.count, induced_volume / static_cast<double>(p.count));
    return PointCloud::scaled_euclidean(std::move(coords), dim, scale, std::move(weights),
                                        "horospherical");
}

/// Uniform sample of an axis-aligned box [0, side]^dim with unit weights.
inline PointCloud box_cloud(std::size_t dim, double side, std::size_t count, std::uint64_t seed) {
    if (dim == 0 || count == 0) throw std::invalid_argument("box_cloud: empty spec");
    if (!(side > 0.0)) throw std::invalid_argument("box_cloud: side must be positive");
    Rng rng = Rng(seed).split("box");
    std::vector<double> coords(count * dim);
    for (double& c : coords) c = rng.uniform(0.0, side);
    return PointCloud::euclidean(std::move(coords), dim);
}

/// Surface at distance tube_radius from the rectangular antenna pattern:
/// flat cylinders around every edge, meeting at the vertices. Sampled with a
/// hop-graph metric oracle (approximate by construction).
struct TubeSurfaceSpec {
    double tube_radius = 0.2; ///< must stay < 1/4 so cylinders merge only at vertices
    int arm_extent = 6;
    int spine_extent = 6;
    double density = 12.0;    ///< points per unit area
    std::uint64_t seed = 0;
};

/// Sample plus the fields the surface carries: the lifted height function
/// (value of the spine coordinate, linear along the spine, constant on arms)
/// and its analytic gradient magnitude.
struct TubeCloud {
    PointCloud cloud;
    std::vector<double> height;
    std::vector<double> height_gradient;
    /// Foot of each sample on the underlying pattern, as (m, n) coordinates.
    std::vector<std::array<double, 2>> graph_position;
};

inline TubeCloud tube_surface_cloud(const TubeSurfaceSpec& spec) {
    if (!(spec.tube_radius > 0.0) || spec.tube_radius >= 0.25)
        throw std::invalid_argument("tube_surface_cloud: tube_radius must lie in (0, 1/4)");
    if (spec.arm_extent < 1 || spec.spine_extent < 1)
        throw std::invalid_argument("tube_surface_cloud: extents must be >= 1");
    if (!(spec.density > 0.0)) throw std::invalid_argument("tube_surface_cloud: density must be positive");

    struct Edge {
        double bx, by;   // base vertex (m, n)
        bool vertical;   // spine edge (along y) vs arm edge (along x)
    };
    std::vector<Edge> edge_list;
    for (int n = -spec.spine_extent; n < spec.spine_extent; ++n)
        edge_list.push_back({0.0, static_cast<double>(n), true});
    for (int n = -spec.spine_extent; n <= spec.spine_extent; ++n)
        for (int m = -spec.arm_extent; m < spec.arm_extent; ++m)
            edge_list.push_back({static_cast<double>(m), static_cast<double>(n), false});

    const double two_pi = 2.0 * 3.14159265358979323846;
    const double circumference = two_pi * spec.tube_radius;
    const double total_area = circumference * static_cast<double>(edge_list.size());
    const auto per_edge = static_cast<std::size_t>(std::llround(spec.density * circumference));
    if (per_edge < 6)
        throw std::invalid_argument("tube_surface_cloud: density too low for a usable sample");
    // Stratified jittered grid on each unrolled cylinder: uniform density
    // without the sparse bands an iid sample leaves, which would distort the
    // hop metric.
    const auto n_t = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(per_edge) / circumference))));
    const auto n_theta = (per_edge + n_t - 1) / n_t;
    const std::size_t count = edge_list.size() * n_t * n_theta;

    Rng rng = Rng(spec.seed).split("tube");
    std::vector<double> coords;
    coords.reserve(count * 3);
    std::vector<double> height, grad;
    std::vector<std::array<double, 2>> foot;
    height.reserve(count);
    grad.reserve(count);
    foot.reserve(count);
    for (const Edge& e : edge_list) {
        for (std::size_t it = 0; it < n_t; ++it) {
            for (std::size_t ith = 0; ith < n_theta; ++ith) {
                const double t = (static_cast<double>(it) + rng.uniform()) / static_cast<double>(n_t);
                const double theta =
                    two_pi * (static_cast<double>(ith) + rng.uniform()) / static_cast<double>(n_theta);
                double x, y;
                if (e.vertical) {
                    x = e.bx + spec.tube_radius * std::cos(theta);
                    y = e.by + t;
                    height.push_back(e.by + t);
                    grad.push_back(1.0);
                } else {
                    x = e.bx + t;
                    y = e.by + spec.tube_radius * std::cos(theta);
                    height.push_back(e.by);
                    grad.push_back(0.0);
                }
                coords.push_back(x);
                coords.push_back(y);
                coords.push_back(spec.tube_radius * std::sin(theta));
                foot.push_back({e.vertical ? e.bx : e.bx + t, e.vertical ? e.by + t : e.by});
            }
        }
    }
    const double spacing = std::sqrt(total_area / static_cast<double>(count));
    // Hops must never bridge the gap between parallel cylinders one row
    // apart, or the oracle invents shortcuts the surface does not have.
    const double gap = 1.0 - 2.0 * spec.tube_radius;
    const double connect_radius = std::min(2.4 * spacing, 0.85 * gap);
    std::vector<double> weights(count, total_area / static_cast<double>(count));
    PointCloud cloud = PointCloud::aux_graph(std::move(coords), 3, connect_radius,
                                             std::move(weights), "tube-graph-ambient");
    return TubeCloud{std::move(cloud), std::move(height), std::move(grad), std::move(foot)};
}

// ---------------------------------------------------------------------------
// Random control graphs.
// ---------------------------------------------------------------------------

/// Random geometric graph on the unit square: uniform points, edges below the
/// connect radius, largest connected component kept. Counting measure.
inline MMGraph random_geometric_graph(std::size_t count, double connect_radius,
                                      std::uint64_t seed) {
    if (count < 2) throw std::invalid_argument("random_geometric_graph: need at least 2 points");
    if (!(connect_radius > 0.0))
        throw std::invalid_argument("random_geometric_graph: radius must be positive");
    Rng rng = Rng(seed).split("rgg");
    std::vector<std::array<double, 2>> pts(count);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) {
            const double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1];
            if (dx * dx + dy * dy < connect_radius * connect_radius) edges.push_back({i, j});
        }
    // Largest component via union-find.
    std::vector<std::size_t> parent(count);
    for (std::size_t i = 0; i < count; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [a, b] : edges) parent[find(a)] = find(b);
    std::vector<std::size_t> comp_size(count, 0);
    for (std::size_t i = 0; i < count; ++i) ++comp_size[find(i)];
    std::size_t best = 0;
    for (std::size_t i = 1; i < count; ++i)
        if (comp_size[find(i)] > comp_size[find(best)]) best = i;
    const std::size_t root = find(best);
    std::vector<VertexId> remap(count, 0);
    std::vector<std::array<double, 2>> kept_coords;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < count; ++i)
        if (find(i) == root) {
            remap[i] = static_cast<VertexId>(kept++);
            kept_coords.push_back(pts[i]);
        }
    if (kept < 2) throw std::runtime_error("random_geometric_graph: largest component too small");
    std::vector<std::pair<VertexId, VertexId>> kept_edges;
    for (auto [a, b] : edges)
        if (find(a) == root && find(b) == root) kept_edges.push_back({remap[a], remap[b]});
    MMGraph g = MMGraph::from_edges(kept, kept_edges, {},
                                    "rgg(n=" + std::to_string(count) + ",seed=" + std::to_string(seed) + ")");
    g.set_coordinates(std::move(kept_coords));
    return g;
}

} // namespace mmp
