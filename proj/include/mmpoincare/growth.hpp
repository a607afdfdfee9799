#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmpoincare/graph.hpp"

namespace mmp {

/// Ball volume mu(B(center, R)) tabulated over a list of radii.
struct VolumeCurve {
    std::vector<double> radii;
    std::vector<double> volumes;
};

enum class GrowthClass { Polynomial, Exponential, Undetermined };

inline std::string to_string(GrowthClass c) {
    switch (c) {
        case GrowthClass::Polynomial: return "polynomial";
        case GrowthClass::Exponential: return "exponential";
        default: return "undetermined";
    }
}

/// Fitted polynomial-growth parameters. By construction v_prime is the max of
/// V(R)/R^alpha_hat over the fitted range, so V(R) <= v_prime * R^alpha_hat
/// holds exactly on every in-range sample.
struct GrowthFit {
    double alpha_hat = 0.0;
    double v_prime = 0.0;
    double R0_prime = 0.0;   ///< smallest sampled radius from which the bound holds onward
    double residual = 0.0;   ///< RMS residual of the log-log fit
    double residual_exp = 0.0; ///< RMS residual of the log-linear (exponential) fit
    GrowthClass growth_class = GrowthClass::Undetermined;
    double fit_min = 0.0, fit_max = 0.0;
};

/// Per-radius doubling constants C_r = sup over centers of mu(B(x,2r))/mu(B(x,r)).
struct DoublingReport {
    std::vector<double> radii;
    std::vector<double> constants;
};

/// One BFS sweep from `center` gives the whole curve. Radii must be sorted
/// ascending; entries beyond the graph's reach saturate at total mass.
inline VolumeCurve volume_curve(const MMGraph& g, VertexId center, std::span<const double> radii) {
    g.check_vertex(center);
    if (!std::is_sorted(radii.begin(), radii.end()))
        throw std::invalid_argument("volume_curve: radii must be sorted ascending");
    VolumeCurve curve;
    curve.radii.assign(radii.begin(), radii.end());
    if (radii.empty()) return curve;
    const int max_hop = static_cast<int>(std::floor(radii.back()));
    auto dist = bfs_distances(g, center, max_hop);
    // mass per distance shell, then prefix sums
    std::vector<double> shell(static_cast<std::size_t>(max_hop) + 1, 0.0);
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (dist[v] != kUnreachable && dist[v] <= max_hop)
            shell[static_cast<std::size_t>(dist[v])] += g.measure(static_cast<VertexId>(v));
    std::vector<double> prefix(shell.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < shell.size(); ++k) {
        acc += shell[k];
        prefix[k] = acc;
    }
    for (double R : radii) {
        if (R < 0.0) throw std::invalid_argument("volume_curve: negative radius");
        const auto hop = static_cast<std::size_t>(std::floor(R));
        curve.volumes.push_back(prefix[std::min(hop, prefix.size() - 1)]);
    }
    for (std::size_t i = 1; i < curve.volumes.size(); ++i)
        if (curve.volumes[i] < curve.volumes[i - 1])
            throw std::runtime_error("volume_curve: internal error, curve not monotone");
    return curve;
}

namespace detail {

struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
};

inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

} // namespace detail

/// Least-squares fit of log V against log R over the given radius range.
/// Classification compares the log-log fit with a log-linear one: whichever
/// wins by a 2x residual margin names the class, anything closer stays
/// undetermined.
inline GrowthFit fit_growth(const VolumeCurve& curve, double range_min, double range_max) {
    std::vector<double> lr, lv, rr;
    for (std::size_t i = 0; i < curve.radii.size(); ++i) {
        const double R = curve.radii[i], V = curve.volumes[i];
        if (R < range_min || R > range_max) continue;
        if (!(R > 0.0)) throw std::invalid_argument("fit_growth: in-range radii must be positive");
        if (!(V > 0.0)) throw std::invalid_argument("fit_growth: in-range volumes must be positive");
        lr.push_back(std::log(R));
        lv.push_back(std::log(V));
        rr.push_back(R);
    }
    if (lr.size() < 5)
        throw std::invalid_argument("fit_growth: need at least 5 samples in the fit range, have " +
                                    std::to_string(lr.size()));
    const auto poly = detail::least_squares(lr, lv);
    const auto expo = detail::least_squares(rr, lv);

    GrowthFit fit;
    fit.alpha_hat = poly.slope;
    fit.residual = poly.rms;
    fit.residual_exp = expo.rms;
    fit.fit_min = range_min;
    fit.fit_max = range_max;
    if (expo.rms * 2.0 < poly.rms)
        fit.growth_class = GrowthClass::Exponential;
    else if (poly.rms * 2.0 < expo.rms)
        fit.growth_class = GrowthClass::Polynomial;
    else
        fit.growth_class = GrowthClass::Undetermined;

    double vp = 0.0;
    for (std::size_t i = 0; i < rr.size(); ++i)
        vp = std::max(vp, std::exp(lv[i]) / std::pow(rr[i], fit.alpha_hat));
    fit.v_prime = vp;

    // Smallest sampled radius such that the fitted bound holds for every
    // sample from there on. In-range samples satisfy it by construction, so
    // this reaches range_min unless a larger out-of-range sample violates
    // the bound; then the onset moves up (or past the data entirely).
    fit.R0_prime = std::numeric_limits<double>::infinity();
    for (std::size_t i = curve.radii.size(); i-- > 0;) {
        const double R = curve.radii[i];
        if (!(R > 0.0)) break;
        if (curve.volumes[i] <= vp * std::pow(R, fit.alpha_hat) * (1.0 + 1e-12))
            fit.R0_prime = R;
        else
            break;
    }
    return fit;
}

/// Supremum of mu(B(x,2r))/mu(B(x,r)) over the given centers, per radius.
inline DoublingReport doubling_constants(const MMGraph& g, std::span<const VertexId> centers,
                                         std::span<const double> radii) {
    DoublingReport report;
    for (double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("doubling_constants: radii must be positive");
        double worst = 0.0;
        for (VertexId c : centers) {
            const double big = ball(g, c, 2.0 * r).total_mass;
            const double small = ball(g, c, r).total_mass;
            worst = std::max(worst, big / small);
        }
        report.radii.push_back(r);
        report.constants.push_back(worst);
    }
    return report;
}

/// Curvature-derived doubling bound 2^n * exp(2 (n-1) sqrt(kappa) r).
inline double bishop_gromov_doubling(int n, double kappa, double r) {
    if (n < 1) throw std::invalid_argument("bishop_gromov_doubling: n must be >= 1");
    if (kappa < 0.0) throw std::invalid_argument("bishop_gromov_doubling: kappa must be >= 0");
    if (!(r > 0.0)) throw std::invalid_argument("bishop_gromov_doubling: r must be positive");
    return std::pow(2.0, n) * std::exp(2.0 * (n - 1) * std::sqrt(kappa) * r);
}

} // namespace mmp
