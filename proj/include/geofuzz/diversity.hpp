#pragma once

#include <geofuzz/error.hpp>
#include <geofuzz/markov_geometry.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <numeric>
#include <vector>

namespace geofuzz {

    /// Z(i,j) = exp(-t D(i,j)); infinite distances map to zero similarity.
    template <typename Derived>
    MatrixX<typename Derived::Scalar> similarity_matrix(const Eigen::MatrixBase<Derived>& distances, typename Derived::Scalar t)
    {
        using Scalar = typename Derived::Scalar;
        if (!(t > Scalar(0)))
            throw ParameterError("similarity_matrix: scale must be positive");
        MatrixX<Scalar> z = (-t * distances.array()).exp().matrix();
        z.diagonal().setOnes();
        return z;
    }

    /// 1 / median of the positive finite entries; 1 when there are none.
    template <typename Derived>
    typename Derived::Scalar default_scale(const Eigen::MatrixBase<Derived>& distances)
    {
        using Scalar = typename Derived::Scalar;
        std::vector<Scalar> positive;
        for (Eigen::Index j = 0; j < distances.cols(); ++j)
            for (Eigen::Index i = 0; i < distances.rows(); ++i)
                if (distances(i, j) > Scalar(0) && std::isfinite(distances(i, j)))
                    positive.push_back(distances(i, j));
        if (positive.empty())
            return Scalar(1);
        const std::size_t mid = positive.size() / 2;
        std::nth_element(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(mid), positive.end());
        Scalar median = positive[mid];
        if (positive.size() % 2 == 0) {
            const Scalar lower = *std::max_element(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(mid));
            median = (median + lower) / Scalar(2);
        }
        return Scalar(1) / median;
    }

    enum class WeightingStatus { Solved, Ridged, UniformFallback };

    template <typename Scalar = double>
    struct Weighting {
        VectorX<Scalar> weights;
        Scalar magnitude = Scalar(0);
        WeightingStatus status = WeightingStatus::Solved;
    };

    /// Solves Z w = 1. An ill-conditioned Z is retried once with a small ridge;
    /// if that also fails the weights fall back to uniform and the status says so.
    template <typename Derived>
    Weighting<typename Derived::Scalar> weighting_from_similarity(const Eigen::MatrixBase<Derived>& z)
    {
        using Scalar = typename Derived::Scalar;
        constexpr Scalar tolerance = Scalar(1e-8);
        const Eigen::Index n = z.rows();
        const VectorX<Scalar> ones = VectorX<Scalar>::Ones(n);

        Weighting<Scalar> out;
        if (n == 0)
            return out;

        auto accept = [&](const VectorX<Scalar>& w) { return w.allFinite() && (z * w - ones).template lpNorm<Eigen::Infinity>() < tolerance; };

        const MatrixX<Scalar> zm = z;
        VectorX<Scalar> w = zm.partialPivLu().solve(ones);
        if (accept(w)) {
            out.weights = w;
            out.status = WeightingStatus::Solved;
        }
        else {
            const Scalar ridge = Scalar(1e-10) * zm.trace() / static_cast<Scalar>(n);
            MatrixX<Scalar> ridged = zm;
            ridged.diagonal().array() += ridge;
            w = ridged.partialPivLu().solve(ones);
            if (accept(w)) {
                out.weights = w;
                out.status = WeightingStatus::Ridged;
            }
            else {
                out.weights = ones / static_cast<Scalar>(n);
                out.status = WeightingStatus::UniformFallback;
            }
        }
        out.magnitude = out.weights.sum();
        return out;
    }

    template <typename Derived>
    Weighting<typename Derived::Scalar> magnitude_weighting(const Eigen::MatrixBase<Derived>& distances, typename Derived::Scalar t)
    {
        using Scalar = typename Derived::Scalar;
        if (!(t > 0))
            throw ParameterError("magnitude_weighting: scale must be positive");
        // Coincident points make Z singular and their weights non-unique; solve on one
        // representative per zero-distance class and split its weight evenly.
        const Eigen::Index n = distances.rows();
        std::vector<Eigen::Index> reps, cls(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            std::size_t c = 0;
            while (c < reps.size() && distances(i, reps[c]) != Scalar(0))
                ++c;
            if (c == reps.size())
                reps.push_back(i);
            cls[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(c);
        }
        if (static_cast<Eigen::Index>(reps.size()) == n)
            return weighting_from_similarity(similarity_matrix(distances, t));

        const MatrixX<Scalar> sub = distances(reps, reps);
        Weighting<Scalar> reduced = weighting_from_similarity(similarity_matrix(sub, t));
        std::vector<int> size(reps.size(), 0);
        for (Eigen::Index c : cls)
            ++size[static_cast<std::size_t>(c)];
        Weighting<Scalar> out;
        out.status = reduced.status;
        out.magnitude = reduced.magnitude;
        out.weights.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(cls[static_cast<std::size_t>(i)]);
            out.weights(i) = reduced.weights(static_cast<Eigen::Index>(c)) / static_cast<Scalar>(size[c]);
        }
        return out;
    }

    template <typename Derived>
    void check_probability_vector(const Eigen::MatrixBase<Derived>& p)
    {
        using Scalar = typename Derived::Scalar;
        if ((p.array() < Scalar(0)).any())
            throw ParameterError("probability vector has a negative entry");
        if (std::abs(p.sum() - Scalar(1)) > Scalar(1e-12))
            throw ParameterError("probability vector does not sum to 1");
    }

    /// -sum_i p_i ln p_i over the support.
    template <typename Derived>
    typename Derived::Scalar shannon_entropy(const Eigen::MatrixBase<Derived>& p)
    {
        using Scalar = typename Derived::Scalar;
        Scalar acc(0);
        for (Eigen::Index i = 0; i < p.size(); ++i)
            if (p(i) > Scalar(0))
                acc -= p(i) * std::log(p(i));
        return acc;
    }

    /// log of the order-1 similarity-sensitive diversity: -sum_i p_i ln (Zp)_i.
    /// Reduces to the Shannon entropy when Z is the identity.
    template <typename DerivedZ, typename DerivedP>
    typename DerivedZ::Scalar log_diversity_order_1(const Eigen::MatrixBase<DerivedZ>& z, const Eigen::MatrixBase<DerivedP>& p)
    {
        using Scalar = typename DerivedZ::Scalar;
        const VectorX<Scalar> zp = z * p;
        Scalar acc(0);
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (p(i) > Scalar(0)) {
                if (!(zp(i) > Scalar(0)))
                    throw NumericalError("diversity: (Zp)_i vanishes on the support");
                acc -= p(i) * std::log(zp(i));
            }
        }
        return acc;
    }

    /// Leinster-Cobbold diversity of order q >= 0.
    template <typename DerivedZ, typename DerivedP>
    typename DerivedZ::Scalar diversity_order_q(const Eigen::MatrixBase<DerivedZ>& z, const Eigen::MatrixBase<DerivedP>& p, typename DerivedZ::Scalar q)
    {
        using Scalar = typename DerivedZ::Scalar;
        check_probability_vector(p);
        if (!(q >= Scalar(0)))
            throw ParameterError("diversity_order_q: q must be nonnegative");
        if (q == Scalar(1))
            return std::exp(log_diversity_order_1(z, p));

        const VectorX<Scalar> zp = z * p;
        Scalar acc(0);
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (p(i) > Scalar(0)) {
                if (!(zp(i) > Scalar(0)))
                    throw NumericalError("diversity: (Zp)_i vanishes on the support");
                acc += p(i) * std::pow(zp(i), q - Scalar(1));
            }
        }
        return std::pow(acc, Scalar(1) / (Scalar(1) - q));
    }

    enum class LandmarkStrategy { GreedyMagnitude, MaxMin };

    struct LandmarkSet {
        std::vector<int> indices;
        // Every candidate coincided; a single landmark was returned.
        bool degenerate = false;
    };

    /// Indices of the first member of each zero-distance class, ascending.
    template <typename Derived>
    std::vector<int> distinct_representatives(const Eigen::MatrixBase<Derived>& distances)
    {
        std::vector<int> reps;
        for (int i = 0; i < static_cast<int>(distances.rows()); ++i) {
            bool duplicate = false;
            for (int r : reps)
                if (distances(i, r) == 0) {
                    duplicate = true;
                    break;
                }
            if (!duplicate)
                reps.push_back(i);
        }
        return reps;
    }

    /// Farthest-pair seed, then greedy growth of the subset's magnitude (or of the
    /// minimum distance to the subset for MaxMin). Ties go to the smallest index.
    template <typename Derived>
    LandmarkSet select_landmarks(const Eigen::MatrixBase<Derived>& distances, int k, typename Derived::Scalar t,
        LandmarkStrategy strategy = LandmarkStrategy::GreedyMagnitude)
    {
        using Scalar = typename Derived::Scalar;
        if (k < 2)
            throw ParameterError("select_landmarks: k must be at least 2");
        if (distances.rows() == 0 || distances.rows() != distances.cols())
            throw ParameterError("select_landmarks: need a nonempty square distance matrix");
        if (!(t > Scalar(0)))
            throw ParameterError("select_landmarks: scale must be positive");

        const std::vector<int> reps = distinct_representatives(distances);
        LandmarkSet out;
        if (reps.size() == 1) {
            out.indices = reps;
            out.degenerate = true;
            return out;
        }
        const std::size_t target = std::min(static_cast<std::size_t>(k), reps.size());

        int best_i = reps[0], best_j = reps[1];
        for (std::size_t a = 0; a < reps.size(); ++a)
            for (std::size_t b = a + 1; b < reps.size(); ++b)
                if (distances(reps[a], reps[b]) > distances(best_i, best_j)) {
                    best_i = reps[a];
                    best_j = reps[b];
                }
        out.indices = {best_i, best_j};

        std::vector<char> chosen(static_cast<std::size_t>(distances.rows()), 0);
        chosen[best_i] = chosen[best_j] = 1;
        while (out.indices.size() < target) {
            int pick = -1;
            Scalar best_score = -std::numeric_limits<Scalar>::infinity();
            std::vector<int> trial = out.indices;
            trial.push_back(-1);
            for (int c : reps) {
                if (chosen[c])
                    continue;
                Scalar score;
                if (strategy == LandmarkStrategy::GreedyMagnitude) {
                    trial.back() = c;
                    const MatrixX<Scalar> sub = distances(trial, trial);
                    score = magnitude_weighting(sub, t).magnitude;
                }
                else {
                    score = std::numeric_limits<Scalar>::infinity();
                    for (int s : out.indices)
                        score = std::min(score, distances(c, s));
                }
                if (score > best_score) {
                    best_score = score;
                    pick = c;
                }
            }
            out.indices.push_back(pick);
            chosen[pick] = 1;
        }
        return out;
    }

    /// Ordered tuple of the m nearest landmarks (nearest first).
    struct CellKey {
        std::vector<int> landmarks;

        auto operator<=>(const CellKey&) const = default;
        bool operator==(const CellKey&) const = default;
    };

    /// Indices of the m smallest entries, ascending by distance, ties by index.
    template <typename Derived>
    CellKey cell_key(const Eigen::MatrixBase<Derived>& landmark_distances, int m)
    {
        const int n = static_cast<int>(landmark_distances.size());
        if (n == 0)
            throw ParameterError("cell_key: no landmarks");
        if (m < 1 || m > n)
            throw ParameterError("cell_key: arity must lie in [1, number of landmarks]");
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + m, order.end(), [&](int a, int b) {
            if (landmark_distances(a) != landmark_distances(b))
                return landmark_distances(a) < landmark_distances(b);
            return a < b;
        });
        order.resize(static_cast<std::size_t>(m));
        return CellKey{std::move(order)};
    }

} // namespace geofuzz
