#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mmp {

/// Shortest-path distance oracle over a sample of points: nearest-neighbor
/// graph with Euclidean edge lengths, Dijkstra trees cached per source.
/// Used where no closed-form intrinsic metric exists (declared approximate).
class AuxGraphMetric {
public:
    AuxGraphMetric(const std::vector<double>& coords, std::size_t dim, double connect_radius)
        : coords_(coords), dim_(dim) {
        const std::size_t n = coords.size() / dim;
        if (n == 0) throw std::invalid_argument("AuxGraphMetric: empty sample");
        build_edges(n, connect_radius);
        // A sparse sample leaves the hop graph disconnected; that is a
        // construction error, not a metric with infinities.
        auto d = dijkstra(0);
        for (std::size_t i = 0; i < n; ++i)
            if (d[i] == kInf)
                throw std::runtime_error(
                    "AuxGraphMetric: sample graph is disconnected; increase density "
                    "or connect radius");
        {
            std::lock_guard<std::mutex> lock(mutex_);
            cache_.emplace(0, std::move(d));
        }
    }

    std::size_t size() const { return coords_.size() / dim_; }

    /// Distance with the Dijkstra tree cached under `source`.
    double distance_from(std::size_t source, std::size_t target) const {
        return tree(source)[target];
    }

    double distance(std::size_t i, std::size_t j) const {
        return distance_from(std::min(i, j), std::max(i, j));
    }

    const std::vector<double>& tree(std::size_t source) const {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(source);
            if (it != cache_.end()) return it->second;
        }
        auto d = dijkstra(source);
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.emplace(source, std::move(d)).first->second;
    }

    /// One-shot tree for sweep loops; bypasses the cache.
    std::vector<double> tree_uncached(std::size_t source) const { return dijkstra(source); }

    /// Visit every point with distance(source, .) <= limit, calling
    /// f(index, distance). Work is proportional to the visited ball, not the
    /// sample size.
    template <typename F>
    void for_each_within(std::size_t source, double limit, F&& f) const {
        std::lock_guard<std::mutex> lock(scratch_mutex_);
        const std::size_t n = size();
        if (scratch_dist_.size() != n) {
            scratch_dist_.assign(n, 0.0);
            scratch_epoch_.assign(n, 0);
            epoch_ = 0;
        }
        ++epoch_;
        using Item = std::pair<double, std::uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        scratch_dist_[source] = 0.0;
        scratch_epoch_[source] = epoch_;
        heap.push({0.0, static_cast<std::uint32_t>(source)});
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (d > limit) break;
            if (scratch_epoch_[v] == epoch_ && d > scratch_dist_[v]) continue;
            f(static_cast<std::size_t>(v), d);
            for (std::uint64_t e = offsets_[v]; e < offsets_[v + 1]; ++e) {
                const double nd = d + lengths_[e];
                const std::uint32_t w = targets_[e];
                if (nd <= limit && (scratch_epoch_[w] != epoch_ || nd < scratch_dist_[w])) {
                    scratch_dist_[w] = nd;
                    scratch_epoch_[w] = epoch_;
                    heap.push({nd, w});
                }
            }
        }
    }

    /// Min distance from each point to the given source set (one sweep).
    std::vector<double> distances_to_set(std::span<const std::size_t> sources) const {
        return dijkstra_multi(sources);
    }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    double euclid(std::size_t i, std::size_t j) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
            const double d = coords_[i * dim_ + k] - coords_[j * dim_ + k];
            acc += d * d;
        }
        return std::sqrt(acc);
    }

    void build_edges(std::size_t n, double radius) {
        // Bucket grid with cell size = radius keeps this O(n * k).
        const double h = radius;
        std::unordered_map<std::string, std::vector<std::uint32_t>> cells;
        std::vector<std::int64_t> cc(dim_);
        auto cell_of = [&](std::size_t i, std::vector<std::int64_t>& out) {
            for (std::size_t k = 0; k < dim_; ++k)
                out[k] = static_cast<std::int64_t>(std::floor(coords_[i * dim_ + k] / h));
        };
        auto cell_str = [&](const std::vector<std::int64_t>& c) {
            std::string s;
            for (auto v : c) {
                s += std::to_string(v);
                s += ',';
            }
            return s;
        };
        for (std::size_t i = 0; i < n; ++i) {
            cell_of(i, cc);
            cells[cell_str(cc)].push_back(static_cast<std::uint32_t>(i));
        }
        offsets_.assign(n + 1, 0);
        std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
        std::vector<std::int64_t> nc(dim_);
        for (std::size_t i = 0; i < n; ++i) {
            cell_of(i, cc);
            // enumerate neighbor cells in {-1,0,1}^dim
            std::vector<int> delta(dim_, -1);
            while (true) {
                for (std::size_t k = 0; k < dim_; ++k) nc[k] = cc[k] + delta[k];
                auto it = cells.find(cell_str(nc));
                if (it != cells.end()) {
                    for (std::uint32_t j : it->second) {
                        if (j <= i) continue;
                        const double d = euclid(i, j);
                        if (d <= radius) {
                            adj[i].push_back({j, d});
                            adj[j].push_back({static_cast<std::uint32_t>(i), d});
                        }
                    }
                }
                std::size_t k = 0;
                while (k < dim_ && delta[k] == 1) delta[k++] = -1;
                if (k == dim_) break;
                ++delta[k];
            }
        }
        for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + adj[i].size();
        targets_.resize(offsets_[n]);
        lengths_.resize(offsets_[n]);
        for (std::size_t i = 0, w = 0; i < n; ++i)
            for (auto [j, d] : adj[i]) {
                targets_[w] = j;
                lengths_[w] = d;
                ++w;
            }
    }

    std::vector<double> dijkstra(std::size_t source) const {
        std::vector<std::size_t> s{source};
        return dijkstra_multi(s);
    }

    std::vector<double> dijkstra_multi(std::span<const std::size_t> sources) const {
        const std::size_t n = size();
        std::vector<double> dist(n, kInf);
        using Item = std::pair<double, std::uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (std::size_t s : sources) {
            dist[s] = 0.0;
            heap.push({0.0, static_cast<std::uint32_t>(s)});
        }
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (d > dist[v]) continue;
            for (std::uint64_t e = offsets_[v]; e < offsets_[v + 1]; ++e) {
                const double nd = d + lengths_[e];
                if (nd < dist[targets_[e]]) {
                    dist[targets_[e]] = nd;
                    heap.push({nd, targets_[e]});
                }
            }
        }
        return dist;
    }

    std::vector<double> coords_;
    std::size_t dim_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> targets_;
    std::vector<double> lengths_;
    mutable std::unordered_map<std::size_t, std::vector<double>> cache_;
    mutable std::mutex mutex_;
    mutable std::vector<double> scratch_dist_;
    mutable std::vector<std::uint32_t> scratch_epoch_;
    mutable std::uint32_t epoch_ = 0;
    mutable std::mutex scratch_mutex_;
};

/// Finite sample of a metric space: coordinates, per-point positive weights
/// approximating the reference measure, and a named distance oracle.
class PointCloud {
public:
    enum class MetricKind { Euclidean, ScaledEuclidean, AuxGraph };

    static PointCloud euclidean(std::vector<double> coords, std::size_t dim,
                                std::vector<double> weights = {}) {
        return PointCloud(std::move(coords), dim, std::move(weights), MetricKind::Euclidean, 1.0,
                          nullptr, "euclidean");
    }

    /// Euclidean coordinate distance times `scale` (e.g. the flat intrinsic
    /// metric induced on a constant-curvature horosphere).
    static PointCloud scaled_euclidean(std::vector<double> coords, std::size_t dim, double scale,
                                       std::vector<double> weights, std::string metric_name) {
        return PointCloud(std::move(coords), dim, std::move(weights), MetricKind::ScaledEuclidean,
                          scale, nullptr, std::move(metric_name));
    }

    /// Shortest-path metric on a dense sample graph in ambient coordinates.
    static PointCloud aux_graph(std::vector<double> coords, std::size_t dim, double connect_radius,
                                std::vector<double> weights, std::string metric_name) {
        auto aux = std::make_shared<AuxGraphMetric>(coords, dim, connect_radius);
        return PointCloud(std::move(coords), dim, std::move(weights), MetricKind::AuxGraph, 1.0,
                          std::move(aux), std::move(metric_name));
    }

    std::size_t size() const { return coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    const std::vector<double>& coords() const { return coords_; }
    const std::vector<double>& weights() const { return weights_; }
    double total_weight() const {
        double acc = 0.0;
        for (double w : weights_) acc += w;
        return acc;
    }

    const std::string& metric_name() const { return metric_name_; }
    MetricKind metric_kind() const { return kind_; }
    double metric_scale() const { return scale_; }

    double distance(std::size_t i, std::size_t j) const {
        switch (kind_) {
            case MetricKind::Euclidean: return euclid(i, j);
            case MetricKind::ScaledEuclidean: return scale_ * euclid(i, j);
            case MetricKind::AuxGraph: return aux_->distance(i, j);
        }
        return 0.0;
    }

    /// Same value as distance(), but the caller promises to reuse `source`,
    /// letting graph-metric oracles cache one tree per source.
    double distance_from(std::size_t source, std::size_t target) const {
        if (kind_ == MetricKind::AuxGraph) return aux_->distance_from(source, target);
        return distance(source, target);
    }

    /// Distances from one point to every point; does not grow the cache.
    std::vector<double> distances_from_all(std::size_t source) const {
        if (kind_ == MetricKind::AuxGraph) return aux_->tree_uncached(source);
        std::vector<double> out(size());
        for (std::size_t j = 0; j < size(); ++j) out[j] = distance(source, j);
        return out;
    }

    /// Visit points with distance(source, .) <= limit; work scales with the
    /// visited ball for graph-metric clouds.
    template <typename F>
    void for_each_within(std::size_t source, double limit, F&& f) const {
        if (kind_ == MetricKind::AuxGraph) {
            aux_->for_each_within(source, limit, std::forward<F>(f));
            return;
        }
        for (std::size_t j = 0; j < size(); ++j) {
            const double d = distance(source, j);
            if (d <= limit) f(j, d);
        }
    }

    /// Min distance from every point to the given set.
    std::vector<double> distances_to_set(std::span<const std::size_t> sources) const {
        if (kind_ == MetricKind::AuxGraph) return aux_->distances_to_set(sources);
        std::vector<double> out(size(), std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t s : sources)
                out[i] = std::min(out[i], distance(s, i));
        return out;
    }

private:
    PointCloud(std::vector<double> coords, std::size_t dim, std::vector<double> weights,
               MetricKind kind, double scale, std::shared_ptr<const AuxGraphMetric> aux,
               std::string metric_name)
        : coords_(std::move(coords)),
          dim_(dim),
          weights_(std::move(weights)),
          kind_(kind),
          scale_(scale),
          aux_(std::move(aux)),
          metric_name_(std::move(metric_name)) {
        if (dim_ == 0) throw std::invalid_argument("PointCloud: dimension must be positive");
        if (coords_.size() % dim_ != 0)
            throw std::invalid_argument("PointCloud: coordinate array length not a multiple of dim");
        const std::size_t n = coords_.size() / dim_;
        if (n == 0) throw std::invalid_argument("PointCloud: empty cloud");
        if (weights_.empty()) weights_.assign(n, 1.0);
        if (weights_.size() != n)
            throw std::invalid_argument("PointCloud: weight count mismatch");
        for (double w : weights_)
            if (!(w > 0.0)) throw std::invalid_argument("PointCloud: weights must be positive");
        if (kind_ == MetricKind::ScaledEuclidean && !(scale_ > 0.0))
            throw std::invalid_argument("PointCloud: metric scale must be positive");
    }

    double euclid(std::size_t i, std::size_t j) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
            const double d = coords_[i * dim_ + k] - coords_[j * dim_ + k];
            acc += d * d;
        }
        return std::sqrt(acc);
    }

    std::vector<double> coords_;
    std::size_t dim_;
    std::vector<double> weights_;
    MetricKind kind_;
    double scale_;
    std::shared_ptr<const AuxGraphMetric> aux_;
    std::string metric_name_;
};

} // namespace mmp
