#include <doctest.h>

#include <geofuzz/error.hpp>
#include <geofuzz/path_space.hpp>

#include "support.hpp"

using namespace geofuzz;

namespace {

    MetricMatrix<double> metric_of(const Eigen::MatrixXd& d)
    {
        MetricMatrix<double> m;
        m.distances = d;
        m.kind = MetricKind::HittingProbability;
        return m;
    }

    // d(0,1)=d(1,2)=1, d(0,2)=2
    Eigen::MatrixXd path3()
    {
        Eigen::MatrixXd d(3, 3);
        d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
        return d;
    }

    Eigen::MatrixXd random_vertex_metric(int n, Rng& rng)
    {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Eigen::MatrixX2d pts(n, 2);
        for (int i = 0; i < n; ++i)
            pts.row(i) << u(rng), u(rng);
        return testing::euclidean(pts);
    }

    std::vector<int> random_sequence(int len, int n, Rng& rng)
    {
        std::uniform_int_distribution<int> v(0, n - 1);
        std::vector<int> s(static_cast<std::size_t>(len));
        for (auto& x : s)
            x = v(rng);
        return s;
    }

} // namespace

TEST_CASE("hausdorff lift on small sets")
{
    const auto m = metric_of(path3());
    CHECK(hausdorff_lift(m, Trace{{0, 1}}, Trace{{1, 2}}) == 1.0);
    CHECK(hausdorff_lift(m, Trace{{0, 1, 0}}, Trace{{1, 0}}) == 0.0);
    CHECK(hausdorff_lift(m, Trace{{0}}, Trace{{2}}) == 2.0);
    CHECK_THROWS_AS(hausdorff_lift(m, Trace{}, Trace{{2}}), ParameterError);
}

TEST_CASE("hausdorff lift is a metric on vertex sets")
{
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::MatrixXd d = random_vertex_metric(10, rng);
        const auto m = metric_of(d);
        const Trace a{random_sequence(1 + trial % 5, 10, rng)};
        const Trace b{random_sequence(1 + trial % 7, 10, rng)};
        const Trace c{random_sequence(2 + trial % 3, 10, rng)};
        const double ab = hausdorff_lift(m, a, b), bc = hausdorff_lift(m, b, c), ac = hausdorff_lift(m, a, c);
        CHECK(ab == hausdorff_lift(m, b, a));
        CHECK(ab >= 0.0);
        CHECK(ac <= ab + bc + 1e-9);
    }
}

TEST_CASE("edit lift examples")
{
    const auto m = metric_of(path3());
    CHECK(edit_lift(m, Trace{{0, 1, 2}}, Trace{{0, 1, 2}}, 1.0) == 0.0);
    CHECK(edit_lift(m, Trace{{0, 1, 2}}, Trace{{0, 2}}, 1.0) == 1.0);
    // DP base row: aligning against a single shared vertex leaves k-1 indels
    CHECK(edit_lift(m, Trace{{0}}, Trace{{0, 0, 0, 0}}, 0.7) == doctest::Approx(2.1));
    CHECK_THROWS_AS(edit_lift(m, Trace{{0}}, Trace{{1}}, -1.0), ParameterError);
    CHECK(default_indel_cost(m) == 1.0);
}

TEST_CASE("edit lift matches exhaustive alignment")
{
    Rng rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::MatrixXd d = random_vertex_metric(6, rng);
        const auto m = metric_of(d);
        const double indel = 0.5 * d.maxCoeff();
        for (int k = 0; k < 20; ++k) {
            const auto a = random_sequence(1 + static_cast<int>(rng() % 6), 6, rng);
            const auto b = random_sequence(1 + static_cast<int>(rng() % 6), 6, rng);
            const double e = edit_lift(m, Trace{a}, Trace{b}, indel);
            CHECK(e == testing::brute_force_edit(d, a, b, indel));
            CHECK(e == edit_lift(m, Trace{b}, Trace{a}, indel));
            CHECK(e <= indel * static_cast<double>(a.size() + b.size()));
        }
    }
}

TEST_CASE("repeat compression caps loop iterations")
{
    const std::vector<VertexId> loop{0, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 3};
    CHECK(compress_repeats(loop) == std::vector<VertexId>{0, 1, 2, 1, 2, 1, 2, 3});
    const std::vector<VertexId> run{5, 5, 5, 5, 5};
    CHECK(compress_repeats(run) == std::vector<VertexId>{5, 5, 5});
    const std::vector<VertexId> plain{0, 1, 2, 3};
    CHECK(compress_repeats(plain) == plain);
    CHECK(compress_repeats(loop, 1) == std::vector<VertexId>{0, 1, 2, 3});
    CHECK_THROWS_AS(compress_repeats(plain, 0), ParameterError);
}

TEST_CASE("path metric dispatches on the lift")
{
    const auto m = metric_of(path3());
    const PathSignature a = PathSignature::from_trace(Trace{{0, 1, 2}});
    const PathSignature b = PathSignature::from_trace(Trace{{0, 2}});
    const PathMetric haus(m, {LiftKind::Hausdorff, -1.0});
    CHECK(haus(a, b) == 1.0);
    const PathMetric edit(m, {LiftKind::Edit, -1.0});
    CHECK(edit.indel_cost() == 1.0);
    CHECK(edit(a, b) == 1.0);
    CHECK(lift_kind_from_string("edit") == LiftKind::Edit);
    CHECK_THROWS_AS(lift_kind_from_string("jaccard"), ParameterError);
}
