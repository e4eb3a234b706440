#pragma once

#include <geofuzz/error.hpp>
#include <geofuzz/markov_geometry.hpp>
#include <geofuzz/toylang.hpp>

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

namespace geofuzz {

    enum class LiftKind { Hausdorff, Edit };

    const char* to_string(LiftKind kind);
    LiftKind lift_kind_from_string(const std::string& name);

    struct PathDissimilarityConfig {
        LiftKind kind = LiftKind::Hausdorff;
        // Negative means "half the largest vertex distance".
        double indel_cost = -1.0;
    };

    /// Truncates consecutive repetitions of any vertex cycle to `max_repeats` copies.
    std::vector<VertexId> compress_repeats(std::span<const VertexId> sequence, int max_repeats = 3);

    /// Trace reduced to what the lifts consume: its vertex set and its compressed sequence.
    struct PathSignature {
        std::vector<VertexId> vertex_set;
        std::vector<VertexId> sequence;

        static PathSignature from_trace(const Trace& trace) { return {trace.vertex_set(), compress_repeats(trace.vertices)}; }
    };

    /// Hausdorff distance between two vertex sets under a vertex metric.
    template <typename Derived>
    typename Derived::Scalar hausdorff_sets(const Eigen::MatrixBase<Derived>& d, std::span<const VertexId> a, std::span<const VertexId> b)
    {
        using Scalar = typename Derived::Scalar;
        auto directed = [&](std::span<const VertexId> from, std::span<const VertexId> to) {
            Scalar worst(0);
            for (VertexId x : from) {
                Scalar nearest = std::numeric_limits<Scalar>::infinity();
                for (VertexId y : to)
                    nearest = std::min(nearest, d(x, y));
                worst = std::max(worst, nearest);
            }
            return worst;
        };
        return std::max(directed(a, b), directed(b, a));
    }

    template <typename Scalar>
    Scalar hausdorff_lift(const MetricMatrix<Scalar>& metric, const Trace& a, const Trace& b)
    {
        if (a.vertices.empty() || b.vertices.empty())
            throw ParameterError("hausdorff_lift: empty trace");
        const auto sa = a.vertex_set(), sb = b.vertex_set();
        return hausdorff_sets(metric.distances, std::span<const VertexId>(sa), std::span<const VertexId>(sb));
    }

    /// Alignment cost with substitution d(u,v) and insertion/deletion cost c.
    template <typename Derived>
    typename Derived::Scalar edit_sequences(const Eigen::MatrixBase<Derived>& d, std::span<const VertexId> a, std::span<const VertexId> b,
        typename Derived::Scalar indel)
    {
        using Scalar = typename Derived::Scalar;
        const std::size_t n = a.size(), m = b.size();
        std::vector<Scalar> prev(m + 1), cur(m + 1);
        // borders accumulate like every other cell, so costs are sums along the alignment
        prev[0] = Scalar(0);
        for (std::size_t j = 1; j <= m; ++j)
            prev[j] = prev[j - 1] + indel;
        for (std::size_t i = 1; i <= n; ++i) {
            cur[0] = prev[0] + indel;
            for (std::size_t j = 1; j <= m; ++j)
                cur[j] = std::min({prev[j] + indel, cur[j - 1] + indel, prev[j - 1] + d(a[i - 1], b[j - 1])});
            std::swap(prev, cur);
        }
        return prev[m];
    }

    template <typename Scalar>
    Scalar edit_lift(const MetricMatrix<Scalar>& metric, const Trace& a, const Trace& b, Scalar indel)
    {
        if (a.vertices.empty() || b.vertices.empty())
            throw ParameterError("edit_lift: empty trace");
        if (indel < Scalar(0))
            throw ParameterError("edit_lift: indel cost must be nonnegative");
        return edit_sequences(metric.distances, std::span<const VertexId>(a.vertices), std::span<const VertexId>(b.vertices), indel);
    }

    template <typename Scalar>
    Scalar default_indel_cost(const MetricMatrix<Scalar>& metric)
    {
        return metric.distances.size() == 0 ? Scalar(0) : Scalar(0.5) * metric.distances.maxCoeff();
    }

    /// Lifts a vertex metric to path signatures under a fixed configuration.
    class PathMetric {
    public:
        PathMetric() = default;
        PathMetric(const MetricMatrix<double>& metric, PathDissimilarityConfig config)
            : _distances(metric.distances), _config(config)
        {
            _indel = config.indel_cost >= 0 ? config.indel_cost : default_indel_cost(metric);
        }

        LiftKind kind() const { return _config.kind; }
        double indel_cost() const { return _indel; }

        double operator()(const PathSignature& a, const PathSignature& b) const
        {
            if (_config.kind == LiftKind::Hausdorff)
                return hausdorff_sets(_distances, std::span<const VertexId>(a.vertex_set), std::span<const VertexId>(b.vertex_set));
            return edit_sequences(_distances, std::span<const VertexId>(a.sequence), std::span<const VertexId>(b.sequence), _indel);
        }

    private:
        MatrixX<double> _distances;
        PathDissimilarityConfig _config;
        double _indel = 0.0;
    };

} // namespace geofuzz
