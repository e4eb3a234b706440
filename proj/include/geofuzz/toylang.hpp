#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace geofuzz {

    using Rng = std::mt19937_64;
    using Word = int;
    using VertexId = int;

    /// A program input: `input_length` words, each in {1..N}.
    using InputVec = std::vector<Word>;

    struct GenParams {
        int alphabet_size = 8;
        int max_statements = 28;
        int max_depth = 5;
        double prob_if = 0.4;
        double prob_while = 0.2;
        double prob_assign = 0.4;
        std::uint64_t seed = 0;

        /// Throws ParameterError when probabilities do not sum to one or N < 2.
        void validate() const;
    };

    enum class VertexKind { Entry, Exit, Block, Branch, Join, LoopHeader };

    const char* to_string(VertexKind kind);
    VertexKind vertex_kind_from_string(const std::string& name);

    struct Statement {
        enum class Kind { If, While, Assign };

        Kind kind = Kind::Assign;

        // If: `x[input_index] == constant`. While: `b[variable] != x[input_index]`.
        int input_index = -1;
        Word constant = 0;
        // While: loop-owned variable. Assign: incremented variable.
        int variable = -1;

        // If: branch vertex. While: loop header. Assign: the block itself.
        VertexId vertex = -1;
        // If: join vertex. While: the step block `b := inc(b)`.
        VertexId aux_vertex = -1;
        // If only: explicit block vertices standing in for empty branches.
        VertexId empty_then = -1;
        VertexId empty_else = -1;

        // If: then/else bodies. While: loop body (in `then_body`).
        std::vector<Statement> then_body;
        std::vector<Statement> else_body;

        bool operator==(const Statement&) const = default;
    };

    using StatementList = std::vector<Statement>;

    /// Control flow graph with a structural exit -> entry edge.
    struct Cfg {
        std::vector<VertexKind> kinds;
        // Successors in source order; for predicates the true edge comes first.
        std::vector<std::vector<VertexId>> successors;
        std::vector<std::pair<VertexId, VertexId>> edges;
        VertexId entry = 0;
        VertexId exit = 0;

        int vertex_count() const { return static_cast<int>(kinds.size()); }
        /// All edges, including exit -> entry.
        int edge_count() const { return static_cast<int>(edges.size()); }
        /// Edges an execution can traverse (excludes exit -> entry).
        int coverable_edge_count() const { return edge_count() - 1; }

        bool has_edge(VertexId from, VertexId to) const;
        Eigen::MatrixXd adjacency() const;

        bool operator==(const Cfg&) const = default;
    };

    struct Program {
        int alphabet_size = 8;
        int input_length = 0;
        int variable_count = 0;
        StatementList statements;
        Cfg cfg;

        bool operator==(const Program&) const = default;
    };

    struct Trace {
        std::vector<VertexId> vertices;

        /// Sorted distinct vertices.
        std::vector<VertexId> vertex_set() const;
        /// Consecutive (from, to) pairs in order of traversal.
        std::vector<std::pair<VertexId, VertexId>> edge_sequence() const;

        bool operator==(const Trace&) const = default;
    };

    Program generate_program(const GenParams& params);

    /// Interprets `program` on `input`. Throws InputError on length/alphabet mismatch.
    Trace execute(const Program& program, const InputVec& input);

    /// Hamming distance; throws InputError for unequal lengths.
    int input_distance(const InputVec& a, const InputVec& b);

    /// Resamples one uniformly chosen coordinate to a different word.
    InputVec atomic_mutate(const InputVec& input, int alphabet_size, Rng& rng);

    InputVec random_input(const Program& program, Rng& rng);

    /// Human-readable source listing (1-based input indices, as in `x[1]`).
    std::string pretty_print(const Program& program);

} // namespace geofuzz
