#include <doctest.h>

#include <geofuzz/error.hpp>
#include <geofuzz/serialization.hpp>
#include <geofuzz/toylang.hpp>

#include "support.hpp"

#include <algorithm>
#include <set>

using namespace geofuzz;

namespace {

    GenParams single(Statement::Kind kind, int alphabet = 8, std::uint64_t seed = 1)
    {
        GenParams p;
        p.alphabet_size = alphabet;
        p.max_statements = 1;
        p.prob_if = kind == Statement::Kind::If ? 1.0 : 0.0;
        p.prob_while = kind == Statement::Kind::While ? 1.0 : 0.0;
        p.prob_assign = kind == Statement::Kind::Assign ? 1.0 : 0.0;
        p.seed = seed;
        return p;
    }

    bool contains(const Trace& t, VertexId v) { return std::find(t.vertices.begin(), t.vertices.end(), v) != t.vertices.end(); }

} // namespace

TEST_CASE("a lone if yields the six-vertex diamond")
{
    const Program p = generate_program(single(Statement::Kind::If));
    CHECK(p.input_length == 1);
    CHECK(p.cfg.vertex_count() == 6);
    CHECK(p.cfg.edge_count() == 7);
    CHECK(p.cfg.has_edge(p.cfg.exit, p.cfg.entry));
    std::multiset<VertexKind> kinds(p.cfg.kinds.begin(), p.cfg.kinds.end());
    CHECK(kinds.count(VertexKind::Entry) == 1);
    CHECK(kinds.count(VertexKind::Exit) == 1);
    CHECK(kinds.count(VertexKind::Branch) == 1);
    CHECK(kinds.count(VertexKind::Join) == 1);
    CHECK(kinds.count(VertexKind::Block) == 2);
}

TEST_CASE("if predicate picks the branch")
{
    const Program p = generate_program(single(Statement::Kind::If));
    const Statement& s = p.statements.at(0);
    REQUIRE(s.kind == Statement::Kind::If);
    CHECK(s.constant >= 1);
    CHECK(s.constant <= 8);
    const Word other = s.constant == 8 ? 1 : s.constant + 1;

    const Trace hit = execute(p, {s.constant});
    CHECK(contains(hit, s.empty_then));
    CHECK_FALSE(contains(hit, s.empty_else));
    const Trace miss = execute(p, {other});
    CHECK(contains(miss, s.empty_else));
    CHECK_FALSE(contains(miss, s.empty_then));
}

TEST_CASE("while loop iterates x-1 times")
{
    const Program p = generate_program(single(Statement::Kind::While));
    const Statement& s = p.statements.at(0);
    REQUIRE(s.kind == Statement::Kind::While);
    // guard false at once: body absent
    CHECK_FALSE(contains(execute(p, {1}), s.aux_vertex));
    for (Word x = 1; x <= 8; ++x) {
        const Trace t = execute(p, {x});
        CHECK(std::count(t.vertices.begin(), t.vertices.end(), s.aux_vertex) == x - 1);
    }
}

TEST_CASE("generation is deterministic and serializes losslessly")
{
    GenParams params;
    params.seed = 42;
    const Program a = generate_program(params);
    const Program b = generate_program(params);
    CHECK(a == b);
    CHECK(program_to_json(a).dump() == program_to_json(b).dump());
    CHECK(program_from_json(program_to_json(a)) == a);
    CHECK(a.alphabet_size == 8);
    params.seed = 43;
    CHECK_FALSE(generate_program(params) == a);
}

TEST_CASE("default grammar stays within 30..80 vertices")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GenParams params;
        params.seed = seed;
        const int n = generate_program(params).cfg.vertex_count();
        CHECK(n >= 30);
        CHECK(n <= 80);
    }
}

TEST_CASE("invalid grammar parameters")
{
    GenParams p;
    p.prob_if = 0.9;
    CHECK_THROWS_AS(generate_program(p), ParameterError);
    GenParams q;
    q.alphabet_size = 1;
    CHECK_THROWS_AS(generate_program(q), ParameterError);
}

TEST_CASE("traces are walks on the cfg from entry to exit")
{
    Rng rng(7);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GenParams params;
        params.seed = seed;
        const Program p = generate_program(params);
        for (int k = 0; k < 30; ++k) {
            const InputVec x = random_input(p, rng);
            const Trace t = execute(p, x);
            REQUIRE(!t.vertices.empty());
            CHECK(t.vertices.front() == p.cfg.entry);
            CHECK(t.vertices.back() == p.cfg.exit);
            for (const auto& [u, v] : t.edge_sequence())
                CHECK(p.cfg.has_edge(u, v));
            // termination bound
            CHECK(t.vertices.size() <= static_cast<std::size_t>(p.cfg.vertex_count() * p.alphabet_size * std::max(p.input_length, 1)));
            CHECK(execute(p, x) == t);
        }
    }
}

TEST_CASE("small programs reach every edge under exhaustive enumeration")
{
    int tested = 0;
    for (std::uint64_t seed = 0; tested < 25 && seed < 2000; ++seed) {
        GenParams params;
        params.alphabet_size = 3 + static_cast<int>(seed % 2);
        params.max_statements = 6;
        params.seed = seed;
        const Program p = generate_program(params);
        if (p.input_length > 4)
            continue;
        ++tested;
        CHECK(testing::exhaustive_edge_coverage(p) == doctest::Approx(1.0));
    }
    CHECK(tested == 25);
}

TEST_CASE("execute rejects malformed inputs")
{
    const Program p = generate_program(single(Statement::Kind::If));
    CHECK_THROWS_AS(execute(p, {}), InputError);
    CHECK_THROWS_AS(execute(p, {1, 2}), InputError);
    CHECK_THROWS_AS(execute(p, {0}), InputError);
    CHECK_THROWS_AS(execute(p, {9}), InputError);
}

TEST_CASE("hamming distance")
{
    CHECK(input_distance({1, 2, 3}, {1, 2, 3}) == 0);
    CHECK(input_distance({1, 2, 3}, {1, 5, 3}) == 1);
    CHECK(input_distance({1, 1}, {2, 2}) == 2);
    CHECK_THROWS_AS(input_distance({1}, {1, 2}), InputError);

    Rng rng(3);
    std::uniform_int_distribution<int> w(1, 4);
    for (int k = 0; k < 200; ++k) {
        InputVec a(5), b(5), c(5);
        for (int i = 0; i < 5; ++i) {
            a[i] = w(rng);
            b[i] = w(rng);
            c[i] = w(rng);
        }
        CHECK(input_distance(a, b) == input_distance(b, a));
        CHECK(input_distance(a, c) <= input_distance(a, b) + input_distance(b, c));
    }
}

TEST_CASE("atomic mutation changes exactly one word")
{
    Rng rng(11);
    const InputVec parent{1, 2, 3, 4, 5};
    for (int k = 0; k < 100; ++k) {
        const InputVec m = atomic_mutate(parent, 8, rng);
        CHECK(input_distance(parent, m) == 1);
        for (Word w : m) {
            CHECK(w >= 1);
            CHECK(w <= 8);
        }
    }
    CHECK(atomic_mutate({1}, 2, rng) == InputVec{2});
    CHECK(atomic_mutate({}, 8, rng).empty());

    InputVec x = parent;
    for (int k = 1; k <= 6; ++k) {
        x = atomic_mutate(x, 8, rng);
        CHECK(input_distance(parent, x) <= k);
    }
}

TEST_CASE("random inputs respect the alphabet")
{
    GenParams params;
    params.seed = 5;
    const Program p = generate_program(params);
    Rng a(9), b(9);
    const InputVec x = random_input(p, a);
    CHECK(x == random_input(p, b));
    CHECK(static_cast<int>(x.size()) == p.input_length);
    for (Word w : x) {
        CHECK(w >= 1);
        CHECK(w <= p.alphabet_size);
    }
    Program empty = p;
    empty.input_length = 0;
    CHECK(random_input(empty, a).empty());
}

TEST_CASE("input indices follow depth-first order")
{
    GenParams params;
    params.seed = 17;
    const Program p = generate_program(params);
    // every index in 0..L-1 is used exactly once
    std::vector<int> seen;
    std::function<void(const StatementList&)> walk = [&](const StatementList& list) {
        for (const auto& s : list) {
            if (s.kind != Statement::Kind::Assign)
                seen.push_back(s.input_index);
            walk(s.then_body);
            walk(s.else_body);
        }
    };
    walk(p.statements);
    std::sort(seen.begin(), seen.end());
    REQUIRE(static_cast<int>(seen.size()) == p.input_length);
    for (int i = 0; i < p.input_length; ++i)
        CHECK(seen[i] == i);
    CHECK(pretty_print(p).find("x[1]") != std::string::npos);
}
