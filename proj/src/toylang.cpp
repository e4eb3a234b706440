#include <geofuzz/toylang.hpp>

#include <geofuzz/error.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace geofuzz {

    void GenParams::validate() const
    {
        if (alphabet_size < 2)
            throw ParameterError("alphabet size must be at least 2");
        if (max_statements < 1)
            throw ParameterError("max_statements must be at least 1");
        if (max_depth < 1)
            throw ParameterError("max_depth must be at least 1");
        if (prob_if < 0 || prob_while < 0 || prob_assign < 0)
            throw ParameterError("production probabilities must be nonnegative");
        if (std::abs(prob_if + prob_while + prob_assign - 1.0) > 1e-12)
            throw ParameterError("production probabilities must sum to 1");
    }

    const char* to_string(VertexKind kind)
    {
        switch (kind) {
        case VertexKind::Entry:
            return "entry";
        case VertexKind::Exit:
            return "exit";
        case VertexKind::Block:
            return "block";
        case VertexKind::Branch:
            return "branch";
        case VertexKind::Join:
            return "join";
        case VertexKind::LoopHeader:
            return "loop_header";
        }
        return "?";
    }

    VertexKind vertex_kind_from_string(const std::string& name)
    {
        for (auto kind : {VertexKind::Entry, VertexKind::Exit, VertexKind::Block, VertexKind::Branch, VertexKind::Join, VertexKind::LoopHeader})
            if (name == to_string(kind))
                return kind;
        throw ParameterError("unknown vertex kind '" + name + "'");
    }

    bool Cfg::has_edge(VertexId from, VertexId to) const
    {
        if (from < 0 || from >= vertex_count())
            return false;
        const auto& succ = successors[from];
        return std::find(succ.begin(), succ.end(), to) != succ.end();
    }

    Eigen::MatrixXd Cfg::adjacency() const
    {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(vertex_count(), vertex_count());
        for (const auto& [u, v] : edges)
            a(u, v) = 1.0;
        return a;
    }

    std::vector<VertexId> Trace::vertex_set() const
    {
        std::vector<VertexId> set = vertices;
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        return set;
    }

    std::vector<std::pair<VertexId, VertexId>> Trace::edge_sequence() const
    {
        std::vector<std::pair<VertexId, VertexId>> out;
        for (std::size_t i = 1; i < vertices.size(); ++i)
            out.emplace_back(vertices[i - 1], vertices[i]);
        return out;
    }

    namespace {

        class Generator {
        public:
            explicit Generator(const GenParams& params) : _params(params), _rng(params.seed), _remaining(params.max_statements) {}

            Program run()
            {
                Program program;
                program.alphabet_size = _params.alphabet_size;
                while (_remaining > 0)
                    program.statements.push_back(_statement(1));
                program.variable_count = _variable_count;
                return program;
            }

        private:
            StatementList _block(int depth)
            {
                std::uniform_int_distribution<int> length(0, 2);
                int n = std::min(length(_rng), _remaining);
                StatementList out;
                for (int i = 0; i < n; ++i)
                    out.push_back(_statement(depth));
                return out;
            }

            Statement _statement(int depth)
            {
                --_remaining;
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                const double u = unit(_rng);

                Statement s;
                if (depth <= _params.max_depth && u < _params.prob_if) {
                    s.kind = Statement::Kind::If;
                    std::uniform_int_distribution<int> word(1, _params.alphabet_size);
                    s.constant = word(_rng);
                    s.then_body = _block(depth + 1);
                    s.else_body = _block(depth + 1);
                }
                else if (depth <= _params.max_depth && u < _params.prob_if + _params.prob_while) {
                    s.kind = Statement::Kind::While;
                    s.variable = _variable_count++;
                    s.then_body = _block(depth + 1);
                }
                else {
                    // Assignments only touch variables no loop owns, so loop guards stay monotone.
                    s.kind = Statement::Kind::Assign;
                    std::uniform_int_distribution<std::size_t> pick(0, _assign_variables.size());
                    const std::size_t k = pick(_rng);
                    if (k == _assign_variables.size()) {
                        _assign_variables.push_back(_variable_count++);
                    }
                    s.variable = _assign_variables[k];
                }
                return s;
            }

            const GenParams& _params;
            Rng _rng;
            int _remaining;
            int _variable_count = 0;
            std::vector<int> _assign_variables;
        };

        class CfgBuilder {
        public:
            Cfg build(StatementList& statements)
            {
                _cfg.entry = _add(VertexKind::Entry);
                VertexId last = _block(statements, _cfg.entry);
                _cfg.exit = _add(VertexKind::Exit);
                _edge(last, _cfg.exit);
                _edge(_cfg.exit, _cfg.entry);
                return std::move(_cfg);
            }

        private:
            VertexId _add(VertexKind kind)
            {
                _cfg.kinds.push_back(kind);
                _cfg.successors.emplace_back();
                return _cfg.vertex_count() - 1;
            }

            void _edge(VertexId from, VertexId to)
            {
                _cfg.successors[from].push_back(to);
                _cfg.edges.emplace_back(from, to);
            }

            VertexId _block(StatementList& block, VertexId from)
            {
                for (auto& s : block)
                    from = _statement(s, from);
                return from;
            }

            VertexId _branch_arm(StatementList& body, VertexId& empty_vertex, VertexId branch)
            {
                if (body.empty()) {
                    empty_vertex = _add(VertexKind::Block);
                    _edge(branch, empty_vertex);
                    return empty_vertex;
                }
                return _block(body, branch);
            }

            VertexId _statement(Statement& s, VertexId from)
            {
                switch (s.kind) {
                case Statement::Kind::Assign: {
                    s.vertex = _add(VertexKind::Block);
                    _edge(from, s.vertex);
                    return s.vertex;
                }
                case Statement::Kind::If: {
                    s.vertex = _add(VertexKind::Branch);
                    _edge(from, s.vertex);
                    VertexId then_last = _branch_arm(s.then_body, s.empty_then, s.vertex);
                    VertexId else_last = _branch_arm(s.else_body, s.empty_else, s.vertex);
                    s.aux_vertex = _add(VertexKind::Join);
                    _edge(then_last, s.aux_vertex);
                    _edge(else_last, s.aux_vertex);
                    return s.aux_vertex;
                }
                case Statement::Kind::While: {
                    s.vertex = _add(VertexKind::LoopHeader);
                    _edge(from, s.vertex);
                    s.aux_vertex = _add(VertexKind::Block);
                    _edge(s.vertex, s.aux_vertex);
                    VertexId body_last = _block(s.then_body, s.aux_vertex);
                    _edge(body_last, s.vertex);
                    // The false edge is added by whatever follows the loop.
                    return s.vertex;
                }
                }
                return from;
            }

            Cfg _cfg;
        };

        void assign_input_indices(Program& program)
        {
            const Cfg& cfg = program.cfg;
            std::vector<int> index_of(cfg.vertex_count(), -1);
            std::vector<char> seen(cfg.vertex_count(), 0);
            int next = 0;
            std::function<void(VertexId)> dfs = [&](VertexId v) {
                seen[v] = 1;
                if (cfg.kinds[v] == VertexKind::Branch || cfg.kinds[v] == VertexKind::LoopHeader)
                    index_of[v] = next++;
                for (VertexId w : cfg.successors[v])
                    if (!seen[w])
                        dfs(w);
            };
            dfs(cfg.entry);

            std::function<void(StatementList&)> apply = [&](StatementList& block) {
                for (auto& s : block) {
                    if (s.kind != Statement::Kind::Assign)
                        s.input_index = index_of[s.vertex];
                    apply(s.then_body);
                    apply(s.else_body);
                }
            };
            apply(program.statements);
            program.input_length = next;
        }

        class Interpreter {
        public:
            Interpreter(const Program& program, const InputVec& input)
                : _n(program.alphabet_size), _input(input), _vars(program.variable_count, 1) {}

            Trace run(const Program& program)
            {
                _trace.vertices.push_back(program.cfg.entry);
                _block(program.statements);
                _trace.vertices.push_back(program.cfg.exit);
                return std::move(_trace);
            }

        private:
            void _emit(VertexId v) { _trace.vertices.push_back(v); }
            void _inc(int var) { _vars[var] = _vars[var] % _n + 1; }

            void _block(const StatementList& block)
            {
                for (const auto& s : block)
                    _statement(s);
            }

            void _statement(const Statement& s)
            {
                switch (s.kind) {
                case Statement::Kind::Assign:
                    _emit(s.vertex);
                    _inc(s.variable);
                    break;
                case Statement::Kind::If:
                    _emit(s.vertex);
                    if (_input[s.input_index] == s.constant) {
                        if (s.then_body.empty())
                            _emit(s.empty_then);
                        _block(s.then_body);
                    }
                    else {
                        if (s.else_body.empty())
                            _emit(s.empty_else);
                        _block(s.else_body);
                    }
                    _emit(s.aux_vertex);
                    break;
                case Statement::Kind::While:
                    for (;;) {
                        _emit(s.vertex);
                        if (_vars[s.variable] == _input[s.input_index])
                            break;
                        _emit(s.aux_vertex);
                        _inc(s.variable);
                        _block(s.then_body);
                    }
                    break;
                }
            }

            int _n;
            const InputVec& _input;
            std::vector<int> _vars;
            Trace _trace;
        };

        void print_block(std::ostringstream& out, const StatementList& block, int indent)
        {
            const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
            for (const auto& s : block) {
                switch (s.kind) {
                case Statement::Kind::Assign:
                    out << pad << "b" << s.variable + 1 << " := inc(b" << s.variable + 1 << ");  // v" << s.vertex << "\n";
                    break;
                case Statement::Kind::If:
                    out << pad << "if (x[" << s.input_index + 1 << "] == " << s.constant << ") {  // v" << s.vertex << "\n";
                    print_block(out, s.then_body, indent + 1);
                    out << pad << "} else {\n";
                    print_block(out, s.else_body, indent + 1);
                    out << pad << "}  // v" << s.aux_vertex << "\n";
                    break;
                case Statement::Kind::While:
                    out << pad << "while (b" << s.variable + 1 << " != x[" << s.input_index + 1 << "]) {  // v" << s.vertex << "\n";
                    out << pad << "    b" << s.variable + 1 << " := inc(b" << s.variable + 1 << ");  // v" << s.aux_vertex << "\n";
                    print_block(out, s.then_body, indent + 1);
                    out << pad << "}\n";
                    break;
                }
            }
        }

    } // namespace

    Program generate_program(const GenParams& params)
    {
        params.validate();
        Program program = Generator(params).run();
        program.cfg = CfgBuilder().build(program.statements);
        assign_input_indices(program);
        return program;
    }

    Trace execute(const Program& program, const InputVec& input)
    {
        if (static_cast<int>(input.size()) != program.input_length)
            throw InputError("input length " + std::to_string(input.size()) + " != program input length " + std::to_string(program.input_length));
        for (Word w : input)
            if (w < 1 || w > program.alphabet_size)
                throw InputError("input word " + std::to_string(w) + " outside {1.." + std::to_string(program.alphabet_size) + "}");
        return Interpreter(program, input).run(program);
    }

    int input_distance(const InputVec& a, const InputVec& b)
    {
        if (a.size() != b.size())
            throw InputError("input_distance: length mismatch");
        int d = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            d += (a[i] != b[i]);
        return d;
    }

    InputVec atomic_mutate(const InputVec& input, int alphabet_size, Rng& rng)
    {
        if (input.empty())
            return input;
        InputVec out = input;
        std::uniform_int_distribution<std::size_t> coord(0, input.size() - 1);
        const std::size_t i = coord(rng);
        // Draw from {1..N-1} and skip over the current word.
        std::uniform_int_distribution<int> word(1, alphabet_size - 1);
        int w = word(rng);
        if (w >= out[i])
            ++w;
        out[i] = w;
        return out;
    }

    InputVec random_input(const Program& program, Rng& rng)
    {
        std::uniform_int_distribution<int> word(1, program.alphabet_size);
        InputVec out(static_cast<std::size_t>(program.input_length));
        for (auto& w : out)
            w = word(rng);
        return out;
    }

    std::string pretty_print(const Program& program)
    {
        std::ostringstream out;
        out << "// N = " << program.alphabet_size << ", L = " << program.input_length << ", vertices = " << program.cfg.vertex_count()
            << ", edges = " << program.cfg.edge_count() << "\n";
        out << "// entry v" << program.cfg.entry << "\n";
        print_block(out, program.statements, 0);
        out << "// exit v" << program.cfg.exit << "\n";
        return out.str();
    }

} // namespace geofuzz
