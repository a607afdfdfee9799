#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmpoincare/graph.hpp"
#include "mmpoincare/growth.hpp"
#include "mmpoincare/rng.hpp"

namespace mmp {

/// Parameters of the (sigma, beta, sigma) ball inequality: deviation moment
/// of order sigma over B(p,R) against R^beta times the gradient moment over
/// the concentric ball enlarged by outer_factor.
struct PoincareConfig {
    double sigma = 1.0;
    double beta = 1.0;
    double outer_factor = 3.0;
    double r0 = 1.0;

    void validate() const {
        if (sigma < 1.0) throw std::invalid_argument("PoincareConfig: sigma must be >= 1");
        if (beta < 0.0) throw std::invalid_argument("PoincareConfig: beta must be >= 0");
        if (outer_factor < 1.0)
            throw std::invalid_argument("PoincareConfig: outer_factor must be >= 1");
        if (!(r0 > 0.0)) throw std::invalid_argument("PoincareConfig: r0 must be positive");
    }
};

/// One evaluation of the Poincare functional at radius R.
/// ratio = numerator / (R^beta * denominator); a zero denominator under a
/// positive numerator is flagged instead of assigned a number.
struct RatioRecord {
    double radius = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    bool infinite = false;
};

namespace detail {

/// Distance layering of one BFS: vertices ordered by distance with prefix
/// counts, so every concentric ball is a prefix slice.
struct BallLayers {
    std::vector<VertexId> order;
    std::vector<std::size_t> prefix; // prefix[r] = #vertices with dist <= r
    std::size_t count_within(double radius) const {
        if (radius < 0.0) return 0;
        const auto hop = static_cast<std::size_t>(std::floor(radius));
        return prefix[std::min(hop, prefix.size() - 1)];
    }
};

inline BallLayers ball_layers(const MMGraph& g, VertexId center, int max_hop) {
    auto dist = bfs_distances(g, center, max_hop);
    BallLayers layers;
    std::vector<std::size_t> bucket(static_cast<std::size_t>(max_hop) + 2, 0);
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (dist[v] != kUnreachable && dist[v] <= max_hop) ++bucket[static_cast<std::size_t>(dist[v])];
    layers.prefix.assign(static_cast<std::size_t>(max_hop) + 1, 0);
    std::size_t acc = 0;
    std::vector<std::size_t> cursor(static_cast<std::size_t>(max_hop) + 1, 0);
    for (std::size_t k = 0; k <= static_cast<std::size_t>(max_hop); ++k) {
        cursor[k] = acc;
        acc += bucket[k];
        layers.prefix[k] = acc;
    }
    layers.order.resize(acc);
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (dist[v] != kUnreachable && dist[v] <= max_hop)
            layers.order[cursor[static_cast<std::size_t>(dist[v])]++] = static_cast<VertexId>(v);
    return layers;
}

inline double deviation_mass(const MMGraph& g, const ScalarField& u,
                             std::span<const VertexId> members, double sigma) {
    double mass = 0.0, mean_num = 0.0;
    for (VertexId v : members) {
        mass += g.measure(v);
        mean_num += g.measure(v) * u[v];
    }
    const double mean = mean_num / mass;
    double acc = 0.0;
    for (VertexId v : members) acc += std::pow(std::abs(u[v] - mean), sigma) * g.measure(v);
    return acc;
}

inline double gradient_mass(const MMGraph& g, const ScalarField& u,
                            std::span<const VertexId> members, double sigma) {
    double acc = 0.0;
    for (VertexId v : members)
        acc += std::pow(gradient_length(g, u, v), sigma) * g.measure(v);
    return acc;
}

} // namespace detail

/// Evaluate the functional at several radii with a single BFS.
inline std::vector<RatioRecord> poincare_ratio_curve(const MMGraph& g, const ScalarField& u,
                                                     VertexId p, std::span<const double> radii,
                                                     const PoincareConfig& cfg) {
    cfg.validate();
    check_field(g, u);
    g.check_vertex(p);
    if (radii.empty()) return {};
    double max_radius = 0.0;
    for (double R : radii) {
        if (R < cfg.r0)
            throw std::invalid_argument("poincare_ratio: radius below configured minimum r0");
        max_radius = std::max(max_radius, R);
    }
    const int max_hop = static_cast<int>(std::floor(cfg.outer_factor * max_radius));
    const auto layers = detail::ball_layers(g, p, max_hop);

    // Gradient sigma-mass accumulates over the distance ordering, so every
    // outer ball is a running prefix.
    std::vector<double> grad_prefix(layers.order.size() + 1, 0.0);
    for (std::size_t i = 0; i < layers.order.size(); ++i) {
        const VertexId v = layers.order[i];
        grad_prefix[i + 1] =
            grad_prefix[i] + std::pow(gradient_length(g, u, v), cfg.sigma) * g.measure(v);
    }

    std::vector<RatioRecord> records;
    for (double R : radii) {
        RatioRecord rec;
        rec.radius = R;
        const std::size_t inner = layers.count_within(R);
        if (inner == 0) throw std::domain_error("poincare_ratio: empty inner ball");
        rec.numerator = detail::deviation_mass(
            g, u, std::span<const VertexId>(layers.order.data(), inner), cfg.sigma);
        const std::size_t outer = layers.count_within(cfg.outer_factor * R);
        rec.denominator = grad_prefix[outer];
        if (rec.denominator > 0.0)
            rec.ratio = rec.numerator / (std::pow(R, cfg.beta) * rec.denominator);
        else if (rec.numerator > 0.0)
            rec.infinite = true;   // constant on the outer ball but not inside it
        records.push_back(rec);
    }
    return records;
}

inline RatioRecord poincare_ratio(const MMGraph& g, const ScalarField& u, VertexId p, double R,
                                  const PoincareConfig& cfg) {
    const double radii[] = {R};
    return poincare_ratio_curve(g, u, p, radii, cfg).front();
}

/// Both sides of the polynomial-growth ball inequality
///   sum_{B(p,R)} |u-u_R|^sigma mu  <=  6^{sigma-1} v' R^{alpha+sigma-1} sum_{B(p,3R)} (delta u)^sigma mu
/// with (alpha, v') taken from a growth fit of the same graph.
struct BoundMargin {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; ///< rhs - lhs; negative means the bound failed
};

inline BoundMargin poincare_growth_bound(const MMGraph& g, const ScalarField& u, VertexId p,
                                         double R, double sigma, const GrowthFit& fit) {
    check_field(g, u);
    g.check_vertex(p);
    if (sigma < 1.0) throw std::invalid_argument("poincare_growth_bound: sigma must be >= 1");
    if (!std::isfinite(R) || R < 0.0)
        throw std::invalid_argument("poincare_growth_bound: radius must be finite");
    if (R < fit.R0_prime)
        throw std::invalid_argument("poincare_growth_bound: R below the fitted growth onset");
    if (g.guard() && !ball_is_complete(g, p, 3.0 * R))
        throw std::invalid_argument(
            "poincare_growth_bound: truncation too small to contain B(p,3R); "
            "gradient mass would be clipped");
    const int max_hop = static_cast<int>(std::floor(3.0 * R));
    const auto layers = detail::ball_layers(g, p, max_hop);
    const std::size_t inner = layers.count_within(R);
    if (inner == 0) throw std::domain_error("poincare_growth_bound: empty ball");
    BoundMargin out;
    out.lhs = detail::deviation_mass(g, u, std::span<const VertexId>(layers.order.data(), inner),
                                     sigma);
    const double grad =
        detail::gradient_mass(g, u, std::span<const VertexId>(layers.order), sigma);
    out.rhs = std::pow(6.0, sigma - 1.0) * fit.v_prime * std::pow(R, fit.alpha_hat + sigma - 1.0) *
              grad;
    out.margin = out.rhs - out.lhs;
    return out;
}

enum class OptimalConstantMethod { EigenExact, SearchLowerBound };

inline std::string to_string(OptimalConstantMethod m) {
    return m == OptimalConstantMethod::EigenExact ? "eigen_exact" : "search_lower_bound";
}

/// Best constant found for the ball functional together with the field that
/// achieves it. EigenExact results are true optima (sigma = 2); search
/// results are lower bounds and never claim optimality.
struct OptimalConstantResult {
    double value = 0.0;
    ScalarField witness;
    OptimalConstantMethod method = OptimalConstantMethod::SearchLowerBound;
};

namespace detail {

/// Quadratic-form workspace for fields supported on the outer ball: local
/// indexing, adjacency restricted to the support, inner-ball flags.
struct LocalBallProblem {
    std::vector<VertexId> outer;        // global ids, sorted by distance layering
    std::vector<std::int64_t> local_of; // global -> local, -1 outside
    std::vector<char> inner;            // local flag: inside B(p,R)
    std::vector<double> mu;             // local measures
    double inner_mass = 0.0;
    const MMGraph* graph = nullptr;

    static LocalBallProblem build(const MMGraph& g, VertexId p, double R, double outer_factor) {
        if (outer_factor < 1.0)
            throw std::invalid_argument("optimal constant: outer_factor must be >= 1");
        const int max_hop = static_cast<int>(std::floor(outer_factor * R));
        const auto layers = ball_layers(g, p, max_hop);
        LocalBallProblem lp;
        lp.graph = &g;
        lp.outer.assign(layers.order.begin(), layers.order.end());
        lp.local_of.assign(g.vertex_count(), -1);
        for (std::size_t i = 0; i < lp.outer.size(); ++i)
            lp.local_of[lp.outer[i]] = static_cast<std::int64_t>(i);
        const std::size_t inner_count = layers.count_within(R);
        lp.inner.assign(lp.outer.size(), 0);
        for (std::size_t i = 0; i < inner_count; ++i) lp.inner[i] = 1;
        lp.mu.resize(lp.outer.size());
        for (std::size_t i = 0; i < lp.outer.size(); ++i) {
            lp.mu[i] = g.measure(lp.outer[i]);
            if (lp.inner[i]) lp.inner_mass += lp.mu[i];
        }
        return lp;
    }

    std::size_t size() const { return outer.size(); }

    double inner_mean(std::span<const double> u) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            if (inner[i]) acc += mu[i] * u[i];
        return acc / inner_mass;
    }

    double numerator(std::span<const double> u, double sigma) const {
        const double mean = inner_mean(u);
        double acc = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            if (inner[i]) acc += std::pow(std::abs(u[i] - mean), sigma) * mu[i];
        return acc;
    }

    /// Gradient length at local vertex i; support is zero outside the ball.
    double local_gradient(std::span<const double> u, std::size_t i) const {
        double acc = 0.0;
        for (VertexId w : graph->neighbors(outer[i])) {
            const std::int64_t lw = local_of[w];
            const double uw = lw >= 0 ? u[static_cast<std::size_t>(lw)] : 0.0;
            const double d = uw - u[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }

    double denominator(std::span<const double> u, double sigma) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            acc += std::pow(local_gradient(u, i), sigma) * mu[i];
        return acc;
    }

    ScalarField embed(std::span<const double> u) const {
        ScalarField full(graph->vertex_count(), 0.0);
        for (std::size_t i = 0; i < size(); ++i) full[outer[i]] = u[i];
        return full;
    }
};

inline void canonicalize_sign_and_scale(std::vector<double>& u) {
    double peak = 0.0;
    for (double x : u) peak = std::max(peak, std::abs(x));
    if (peak == 0.0) return;
    double lead = 0.0;
    for (double x : u)
        if (std::abs(x) > 1e-14 * peak) {
            lead = x;
            break;
        }
    const double s = (lead < 0.0 ? -1.0 : 1.0) / peak;
    for (double& x : u) x *= s;
}

} // namespace detail

/// Exact optimal constant of the quadratic (sigma = 2) functional over fields
/// supported on B(p, outer_factor * R): the top generalized eigenvalue of the
/// deviation form against the gradient-energy form. The common constant-field
/// kernel is deflated before the reduced symmetric solve.
inline OptimalConstantResult optimal_constant_quadratic(const MMGraph& g, VertexId p, double R,
                                                        double outer_factor) {
    g.check_vertex(p);
    if (R < 0.0) throw std::invalid_argument("optimal_constant_quadratic: negative radius");
    auto lp = detail::LocalBallProblem::build(g, p, R, outer_factor);
    const auto n = static_cast<Eigen::Index>(lp.size());
    OptimalConstantResult result;
    result.method = OptimalConstantMethod::EigenExact;
    if (lp.size() < 2) {
        result.value = 0.0;
        result.witness.assign(g.vertex_count(), 1.0);
        return result;
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!lp.inner[static_cast<std::size_t>(i)]) continue;
        A(i, i) += lp.mu[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j)
            if (lp.inner[static_cast<std::size_t>(j)])
                A(i, j) -= lp.mu[static_cast<std::size_t>(i)] * lp.mu[static_cast<std::size_t>(j)] /
                           lp.inner_mass;
    }
    for (std::size_t i = 0; i < lp.size(); ++i) {
        const double mi = lp.mu[i];
        for (VertexId w : g.neighbors(lp.outer[i])) {
            const std::int64_t lw = lp.local_of[w];
            const auto ii = static_cast<Eigen::Index>(i);
            if (lw >= 0) {
                const auto jj = static_cast<Eigen::Index>(lw);
                B(ii, ii) += mi;
                B(jj, jj) += mi;
                B(ii, jj) -= mi;
                B(jj, ii) -= mi;
            } else {
                B(ii, ii) += mi; // neighbor pinned at zero outside the support
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b_eig(B);
    const double b_max = b_eig.eigenvalues().cwiseAbs().maxCoeff();
    const double tol = b_max * 1e-12 * static_cast<double>(n);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < n; ++k)
        if (b_eig.eigenvalues()(k) > tol) keep.push_back(k);
    if (keep.empty()) {
        result.value = 0.0;
        result.witness.assign(g.vertex_count(), 1.0);
        return result;
    }
    Eigen::MatrixXd W(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        W.col(static_cast<Eigen::Index>(c)) =
            b_eig.eigenvectors().col(keep[c]) / std::sqrt(b_eig.eigenvalues()(keep[c]));
    Eigen::MatrixXd C = W.transpose() * A * W;
    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> c_eig(C);
    const Eigen::Index top = static_cast<Eigen::Index>(keep.size()) - 1;
    const double value = c_eig.eigenvalues()(top);

    if (value <= 1e-14 * std::max(1.0, b_max)) {
        result.value = 0.0;
        result.witness.assign(g.vertex_count(), 1.0);
        return result;
    }
    Eigen::VectorXd w = W * c_eig.eigenvectors().col(top);
    std::vector<double> local(w.data(), w.data() + w.size());
    detail::canonicalize_sign_and_scale(local);
    result.value = value;
    result.witness = lp.embed(local);
    return result;
}

/// Heuristic lower bound on the optimal constant for general sigma >= 1:
/// normalized gradient ascent on log(numerator) - log(denominator) over
/// unrestricted fields, from several seeded starts (coordinate fields when
/// the graph carries coordinates, the distance-from-center field, and random
/// fields). The reported value is achieved by the returned witness under the
/// same ratio functional poincare_ratio evaluates; it is never claimed
/// optimal. beta only rescales the value by R^-beta.
inline OptimalConstantResult optimal_constant_search(const MMGraph& g, VertexId p, double R,
                                                     const PoincareConfig& cfg, std::size_t iters,
                                                     std::uint64_t seed) {
    cfg.validate();
    g.check_vertex(p);
    const double sigma = cfg.sigma;
    const double radius_scale = std::pow(R, cfg.beta);
    OptimalConstantResult best;
    best.method = OptimalConstantMethod::SearchLowerBound;
    best.value = 0.0;
    best.witness.assign(g.vertex_count(), 1.0);

    const int outer_hop = static_cast<int>(std::floor(cfg.outer_factor * R));
    const auto layers = detail::ball_layers(g, p, outer_hop + 1);
    const std::size_t n_inner = layers.count_within(R);
    const std::size_t n_outer = layers.count_within(cfg.outer_factor * R);
    if (n_outer < 2) return best;
    const std::span<const VertexId> inner(layers.order.data(), n_inner);
    const std::span<const VertexId> outer(layers.order.data(), n_outer);
    // free variables: the outer ball plus its one-hop boundary
    const auto& active = layers.order;
    std::vector<char> in_inner(g.vertex_count(), 0), in_outer(g.vertex_count(), 0);
    for (VertexId v : inner) in_inner[v] = 1;
    for (VertexId v : outer) in_outer[v] = 1;
    double inner_mass = 0.0;
    for (VertexId v : inner) inner_mass += g.measure(v);

    auto numerator = [&](const ScalarField& u) {
        double mean = 0.0;
        for (VertexId v : inner) mean += g.measure(v) * u[v];
        mean /= inner_mass;
        double acc = 0.0;
        for (VertexId v : inner) acc += std::pow(std::abs(u[v] - mean), sigma) * g.measure(v);
        return acc;
    };
    auto denominator = [&](const ScalarField& u) {
        double acc = 0.0;
        for (VertexId v : outer)
            acc += std::pow(gradient_length(g, u, v), sigma) * g.measure(v);
        return acc;
    };
    auto ratio_of = [&](const ScalarField& u) {
        const double den = denominator(u);
        if (!(den > 0.0)) return -1.0;
        return numerator(u) / (radius_scale * den);
    };

    // d/du of log(numerator) - log(denominator); subgradient convention:
    // vanishing gradient lengths contribute nothing for sigma < 2.
    std::vector<double> dir(g.vertex_count(), 0.0);
    auto ascent_direction = [&](const ScalarField& u) {
        const double num = numerator(u);
        const double den = denominator(u);
        std::fill(dir.begin(), dir.end(), 0.0);
        if (!(num > 0.0) || !(den > 0.0)) return false;
        double mean = 0.0;
        for (VertexId v : inner) mean += g.measure(v) * u[v];
        mean /= inner_mass;
        double signed_sum = 0.0;
        for (VertexId v : inner) {
            const double d = u[v] - mean;
            const double t = sigma * std::pow(std::abs(d), sigma - 1.0) * (d >= 0 ? 1.0 : -1.0);
            dir[v] += g.measure(v) * t / num;
            signed_sum += g.measure(v) * t;
        }
        for (VertexId v : inner) dir[v] -= (g.measure(v) / inner_mass) * signed_sum / num;

        for (VertexId x : outer) {
            const double gl = gradient_length(g, u, x);
            double gpow; // mu_x * sigma * gl^{sigma-2}
            if (gl > 0.0)
                gpow = g.measure(x) * sigma * std::pow(gl, sigma - 2.0);
            else if (sigma == 2.0)
                gpow = g.measure(x) * sigma;
            else
                continue;
            for (VertexId y : g.neighbors(x)) {
                const double diff = u[y] - u[x];
                dir[x] += gpow * diff / den;  // -d(den)/du_x scaled
                dir[y] -= gpow * diff / den;
            }
        }
        return true;
    };

    std::vector<ScalarField> starts;
    if (!g.coordinates().empty()) {
        for (std::size_t axis = 0; axis < 2; ++axis) {
            ScalarField u(g.vertex_count(), 0.0);
            for (VertexId v : active) u[v] = g.coordinates()[v][axis];
            starts.push_back(std::move(u));
        }
    }
    {
        ScalarField u(g.vertex_count(), 0.0);
        auto dist = bfs_distances(g, p, outer_hop + 1);
        for (VertexId v : active) u[v] = static_cast<double>(dist[v]);
        starts.push_back(std::move(u));
    }
    Rng rng = Rng(seed).split("optconst");
    for (int s = 0; s < 3; ++s) {
        ScalarField u(g.vertex_count(), 0.0);
        for (VertexId v : active) u[v] = rng.normal();
        starts.push_back(std::move(u));
    }

    ScalarField trial;
    for (auto& u : starts) {
        double peak = 0.0;
        for (double x : u) peak = std::max(peak, std::abs(x));
        if (peak == 0.0) continue;
        for (double& x : u) x /= peak;
        double value = ratio_of(u);
        if (value < 0.0) continue;
        double step = 0.5;
        for (std::size_t it = 0; it < iters && step > 1e-13; ++it) {
            if (!ascent_direction(u)) break;
            double dpeak = 0.0;
            for (VertexId v : active) dpeak = std::max(dpeak, std::abs(dir[v]));
            if (dpeak == 0.0) break;
            bool improved = false;
            for (double t : {step, step * 0.5, step * 0.25, step * 2.0}) {
                trial = u;
                for (VertexId v : active) trial[v] += (t / dpeak) * dir[v];
                const double v = ratio_of(trial);
                if (v > value) {
                    value = v;
                    u = trial;
                    improved = true;
                    step = t * 1.5;
                    break;
                }
            }
            if (!improved) step *= 0.25;
            double upk = 0.0;
            for (double x : u) upk = std::max(upk, std::abs(x));
            if (upk > 0.0)
                for (double& x : u) x /= upk;
        }
        if (value > best.value) {
            best.value = value;
            best.witness = u;
            detail::canonicalize_sign_and_scale(best.witness);
        }
    }
    return best;
}

/// Ratio records over a radius schedule plus the fitted log-log slope.
/// With beta below alpha + sigma - 1 the ratio must grow; divergence is
/// affirmed when the slope clears the expected gap minus a 0.2 allowance.
struct DivergenceProbe {
    std::vector<RatioRecord> records;
    double slope = 0.0;
    double expected_gap = 0.0; ///< alpha + sigma - 1 - beta
    bool diverges = false;
};

inline DivergenceProbe divergence_probe(const MMGraph& g, const ScalarField& u, VertexId p,
                                        std::span<const double> radii, const PoincareConfig& cfg,
                                        double alpha) {
    if (radii.size() < 4)
        throw std::invalid_argument("divergence_probe: need at least 4 radii");
    DivergenceProbe probe;
    probe.records = poincare_ratio_curve(g, u, p, radii, cfg);
    std::vector<double> lr, lv;
    for (const auto& rec : probe.records) {
        if (rec.infinite || !(rec.ratio > 0.0))
            throw std::domain_error("divergence_probe: ratio not positive at R=" +
                                    std::to_string(rec.radius));
        lr.push_back(std::log(rec.radius));
        lv.push_back(std::log(rec.ratio));
    }
    probe.slope = detail::least_squares(lr, lv).slope;
    probe.expected_gap = alpha + cfg.sigma - 1.0 - cfg.beta;
    probe.diverges = probe.slope >= probe.expected_gap - 0.2;
    return probe;
}

} // namespace mmp
