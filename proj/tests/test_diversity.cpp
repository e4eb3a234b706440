#include <doctest.h>

#include <geofuzz/diversity.hpp>
#include <geofuzz/error.hpp>

#include "support.hpp"

#include <cmath>
#include <limits>

using namespace geofuzz;

namespace {

    Eigen::MatrixXd line_distances(const std::vector<double>& xs)
    {
        const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
        Eigen::MatrixXd d(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                d(i, j) = std::abs(xs[i] - xs[j]);
        return d;
    }

    Eigen::MatrixX2d uniform_square(int n, Rng& rng)
    {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Eigen::MatrixX2d pts(n, 2);
        for (int i = 0; i < n; ++i) {
            pts(i, 0) = u(rng);
            pts(i, 1) = u(rng);
        }
        return pts;
    }

} // namespace

TEST_CASE("similarity matrix and default scale")
{
    const Eigen::MatrixXd d = line_distances({0, 1, 3});
    const Eigen::MatrixXd z = similarity_matrix(d, 2.0);
    CHECK(z(0, 0) == 1.0);
    CHECK(z(0, 2) == doctest::Approx(std::exp(-6.0)));
    // positive entries 1,2,3 (each twice): median 2
    CHECK(default_scale(d) == doctest::Approx(0.5));
    CHECK_THROWS_AS(similarity_matrix(d, 0.0), ParameterError);
}

TEST_CASE("magnitude of separated points is their count")
{
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(5, 5, inf);
    d.diagonal().setZero();
    const auto w = magnitude_weighting(d, 1.0);
    CHECK(w.status == WeightingStatus::Solved);
    CHECK(w.weights.isOnes());
    CHECK(w.magnitude == 5.0);
}

TEST_CASE("two-point magnitude closed form")
{
    for (double t : {0.5, 1.0, 3.0})
        for (double dist : {0.01, std::log(2.0), 1.7, 5.0}) {
            const Eigen::MatrixXd d = line_distances({0.0, dist});
            const double expected = 2.0 / (1.0 + std::exp(-t * dist));
            CHECK(std::abs(magnitude_weighting(d, t).magnitude - expected) < 1e-12);
        }
    CHECK(std::abs(magnitude_weighting(line_distances({0.0, std::log(2.0)}), 1.0).magnitude - 4.0 / 3.0) < 1e-12);
    CHECK(magnitude_weighting(line_distances({0.0, 1e-9}), 1.0).magnitude == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("duplicate points do not change magnitude")
{
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixX2d pts = uniform_square(6, rng);
        Eigen::MatrixX2d dup(9, 2);
        dup << pts, pts.topRows(3);
        const double base = magnitude_weighting(testing::euclidean(pts), 2.0).magnitude;
        const auto with_dups = magnitude_weighting(testing::euclidean(dup), 2.0);
        CHECK(std::abs(with_dups.magnitude - base) < 1e-8);
    }
}

TEST_CASE("weighting residual is small on accepted solves")
{
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd d = testing::euclidean(uniform_square(15, rng));
        const Eigen::MatrixXd z = similarity_matrix(d, default_scale(d));
        const auto w = weighting_from_similarity(z);
        REQUIRE(w.status == WeightingStatus::Solved);
        CHECK((z * w.weights - Eigen::VectorXd::Ones(15)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("order-q diversity identities")
{
    for (int n : {1, 2, 5, 17}) {
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / n);
        CHECK(std::abs(diversity_order_q(id, p, 1.0) - n) < 1e-12);
        CHECK(std::abs(diversity_order_q(Eigen::MatrixXd::Ones(n, n).eval(), p, 1.0) - 1.0) < 1e-12);
    }
    const Eigen::Vector2d half(0.5, 0.5);
    CHECK(diversity_order_q(Eigen::Matrix2d::Identity().eval(), half, 2.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(diversity_order_q(Eigen::Matrix2d::Identity().eval(), Eigen::Vector2d(0.5, 0.6), 1.0), ParameterError);
}

TEST_CASE("identity similarity turns order-1 diversity into Shannon entropy")
{
    Rng rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 9;
        Eigen::VectorXd p(n);
        for (int i = 0; i < n; ++i)
            p(i) = u(rng) + (i == 0 ? 0.1 : 0.0);
        p /= p.sum();
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        CHECK(log_diversity_order_1(id, p) == shannon_entropy(p));
    }
}

TEST_CASE("order-q diversity is continuous at one")
{
    Rng rng(15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 8;
        const Eigen::MatrixXd d = testing::euclidean([&] {
            Eigen::MatrixX2d pts(n, 2);
            for (int i = 0; i < n; ++i)
                pts.row(i) << u(rng), u(rng);
            return pts;
        }());
        const Eigen::MatrixXd z = similarity_matrix(d, 3.0);
        Eigen::VectorXd p(n);
        for (int i = 0; i < n; ++i)
            p(i) = u(rng) + 0.05;
        p /= p.sum();
        const double d1 = diversity_order_q(z, p, 1.0);
        CHECK(std::abs(diversity_order_q(z, p, 1.0 + 1e-4) - d1) < 1e-2);
        CHECK(std::abs(diversity_order_q(z, p, 1.0 - 1e-4) - d1) < 1e-2);
    }
}

TEST_CASE("landmark selection basics")
{
    const auto line = select_landmarks(line_distances({0, 1, 10}), 2, 1.0);
    CHECK(line.indices == std::vector<int>{0, 2});

    const auto all = select_landmarks(line_distances({0, 1, 1, 4, 9}), 10, 1.0);
    CHECK(all.indices.size() == 4);
    CHECK_FALSE(all.degenerate);

    const auto same = select_landmarks(line_distances({2, 2, 2}), 3, 1.0);
    CHECK(same.degenerate);
    CHECK(same.indices == std::vector<int>{0});

    CHECK_THROWS_AS(select_landmarks(line_distances({0, 1}), 1, 1.0), ParameterError);
    CHECK(distinct_representatives(line_distances({3, 1, 3, 1, 2})) == std::vector<int>{0, 1, 4});
}

TEST_CASE("landmark selection is invariant under relabeling")
{
    // The same points under new labels must yield the same selected points.
    Rng rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixX2d pts = uniform_square(20, rng);
        std::vector<int> order(20);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        Eigen::MatrixX2d permuted(20, 2);
        for (int i = 0; i < 20; ++i)
            permuted.row(i) = pts.row(order[i]);
        const Eigen::MatrixXd d0 = testing::euclidean(pts);
        const Eigen::MatrixXd d1 = testing::euclidean(permuted);
        const auto a = select_landmarks(d0, 8, default_scale(d0));
        const auto b = select_landmarks(d1, 8, default_scale(d1));
        std::vector<int> mapped;
        for (int i : b.indices)
            mapped.push_back(order[i]);
        // the farthest pair is unordered; everything after it must match in order
        REQUIRE(mapped.size() == a.indices.size());
        std::sort(mapped.begin(), mapped.begin() + 2);
        std::vector<int> expect = a.indices;
        std::sort(expect.begin(), expect.begin() + 2);
        CHECK(mapped == expect);
    }
}

TEST_CASE("greedy landmarks prefer the periphery")
{
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const Eigen::MatrixX2d pts = uniform_square(41, rng);
        const Eigen::MatrixXd d = testing::euclidean(pts);
        const auto lm = select_landmarks(d, 15, default_scale(d));
        const Eigen::RowVector2d c = pts.colwise().mean();
        double all = 0, sel = 0;
        for (int i = 0; i < 41; ++i)
            all += (pts.row(i) - c).norm();
        for (int i : lm.indices)
            sel += (pts.row(i) - c).norm();
        if (sel / 15 > all / 41)
            ++wins;
    }
    CHECK(wins >= 18);
}

TEST_CASE("max-min landmarks are spread out")
{
    const auto lm = select_landmarks(line_distances({0, 1, 2, 5, 10}), 3, 1.0, LandmarkStrategy::MaxMin);
    CHECK(lm.indices == std::vector<int>{0, 4, 3});
}

TEST_CASE("cell keys rank landmarks by distance")
{
    CHECK(cell_key(Eigen::Vector3d(0.2, 0.5, 0.9), 2).landmarks == std::vector<int>{0, 1});
    CHECK(cell_key(Eigen::Vector2d(0.5, 0.5), 1).landmarks == std::vector<int>{0});
    CHECK(cell_key(Eigen::Vector3d(0.9, 0.1, 0.5), 3).landmarks == std::vector<int>{1, 2, 0});
    CHECK_THROWS_AS(cell_key(Eigen::VectorXd(), 1), ParameterError);
    CHECK_THROWS_AS(cell_key(Eigen::Vector2d(1, 2), 3), ParameterError);
}
