#include <geofuzz/serialization.hpp>

#include <geofuzz/error.hpp>

#include <fstream>
#include <set>

namespace geofuzz {

    namespace {

        json statements_to_json(const StatementList& block)
        {
            json out = json::array();
            for (const auto& s : block) {
                json node;
                node["vertex"] = s.vertex;
                switch (s.kind) {
                case Statement::Kind::Assign:
                    node["type"] = "assign";
                    node["variable"] = s.variable + 1;
                    break;
                case Statement::Kind::If:
                    node["type"] = "if";
                    node["input"] = s.input_index + 1;
                    node["constant"] = s.constant;
                    node["join"] = s.aux_vertex;
                    node["empty_then"] = s.empty_then;
                    node["empty_else"] = s.empty_else;
                    node["then"] = statements_to_json(s.then_body);
                    node["else"] = statements_to_json(s.else_body);
                    break;
                case Statement::Kind::While:
                    node["type"] = "while";
                    node["input"] = s.input_index + 1;
                    node["variable"] = s.variable + 1;
                    node["step"] = s.aux_vertex;
                    node["body"] = statements_to_json(s.then_body);
                    break;
                }
                out.push_back(std::move(node));
            }
            return out;
        }

        StatementList statements_from_json(const json& array)
        {
            StatementList out;
            for (const auto& node : array) {
                Statement s;
                const std::string type = node.at("type").get<std::string>();
                s.vertex = node.at("vertex").get<int>();
                if (type == "assign") {
                    s.kind = Statement::Kind::Assign;
                    s.variable = node.at("variable").get<int>() - 1;
                }
                else if (type == "if") {
                    s.kind = Statement::Kind::If;
                    s.input_index = node.at("input").get<int>() - 1;
                    s.constant = node.at("constant").get<int>();
                    s.aux_vertex = node.at("join").get<int>();
                    s.empty_then = node.at("empty_then").get<int>();
                    s.empty_else = node.at("empty_else").get<int>();
                    s.then_body = statements_from_json(node.at("then"));
                    s.else_body = statements_from_json(node.at("else"));
                }
                else if (type == "while") {
                    s.kind = Statement::Kind::While;
                    s.input_index = node.at("input").get<int>() - 1;
                    s.variable = node.at("variable").get<int>() - 1;
                    s.aux_vertex = node.at("step").get<int>();
                    s.then_body = statements_from_json(node.at("body"));
                }
                else {
                    throw ParameterError("unknown statement type '" + type + "'");
                }
                out.push_back(std::move(s));
            }
            return out;
        }

        json cell_to_json(const CellKey& key) { return key.landmarks; }

    } // namespace

    json program_to_json(const Program& program)
    {
        json doc;
        doc["version"] = program_format_version;
        doc["N"] = program.alphabet_size;
        doc["L"] = program.input_length;
        doc["b_count"] = program.variable_count;
        doc["statements"] = statements_to_json(program.statements);
        json vertices = json::array();
        for (int v = 0; v < program.cfg.vertex_count(); ++v)
            vertices.push_back({{"id", v}, {"kind", to_string(program.cfg.kinds[v])}});
        json edges = json::array();
        for (const auto& [u, v] : program.cfg.edges)
            edges.push_back({u, v});
        doc["cfg"] = {{"entry", program.cfg.entry}, {"exit", program.cfg.exit}, {"vertices", vertices}, {"edges", edges}};
        return doc;
    }

    Program program_from_json(const json& doc)
    {
        try {
            if (doc.at("version").get<int>() != program_format_version)
                throw ParameterError("unsupported program format version");
            Program program;
            program.alphabet_size = doc.at("N").get<int>();
            program.input_length = doc.at("L").get<int>();
            program.variable_count = doc.at("b_count").get<int>();
            program.statements = statements_from_json(doc.at("statements"));

            const json& cfg = doc.at("cfg");
            Cfg& g = program.cfg;
            for (const auto& v : cfg.at("vertices")) {
                if (v.at("id").get<int>() != g.vertex_count())
                    throw ParameterError("cfg vertices must be listed in id order");
                g.kinds.push_back(vertex_kind_from_string(v.at("kind").get<std::string>()));
            }
            g.successors.resize(g.kinds.size());
            for (const auto& e : cfg.at("edges")) {
                const int u = e.at(0).get<int>(), v = e.at(1).get<int>();
                if (u < 0 || v < 0 || u >= g.vertex_count() || v >= g.vertex_count())
                    throw ParameterError("cfg edge endpoint out of range");
                g.successors[u].push_back(v);
                g.edges.emplace_back(u, v);
            }
            g.entry = cfg.at("entry").get<int>();
            g.exit = cfg.at("exit").get<int>();
            return program;
        }
        catch (const json::exception& e) {
            throw ParameterError(std::string("malformed program document: ") + e.what());
        }
    }

    json corpus_to_json(const Corpus& corpus)
    {
        json traces = json::array();
        for (const auto& t : corpus.traces)
            traces.push_back(t.vertices);
        return {{"inputs", corpus.inputs}, {"traces", traces}, {"landmark_indices", corpus.landmark_indices}};
    }

    Corpus corpus_from_json(const json& doc)
    {
        try {
            Corpus corpus;
            corpus.inputs = doc.at("inputs").get<std::vector<InputVec>>();
            for (const auto& t : doc.at("traces"))
                corpus.traces.push_back(Trace{t.get<std::vector<VertexId>>()});
            if (doc.contains("landmark_indices"))
                corpus.landmark_indices = doc.at("landmark_indices").get<std::vector<int>>();
            return corpus;
        }
        catch (const json::exception& e) {
            throw ParameterError(std::string("malformed corpus document: ") + e.what());
        }
    }

    json config_to_json(const CampaignConfig& c)
    {
        return {{"budget", c.budget}, {"power_bound", c.power_bound}, {"schedule", to_string(c.schedule)}, {"objective", to_string(c.objective)},
            {"alpha", c.alpha}, {"bandwidth_adapt", c.bandwidth_adapt}, {"pareto", c.pareto_filter}, {"refresh", c.refresh_every},
            {"cell_arity", c.cell_arity}, {"beta", c.beta}, {"epsilon", c.epsilon}, {"scale", c.scale}, {"max_bandwidth", c.max_bandwidth},
            {"escape_low", c.escape_low}, {"escape_high", c.escape_high}, {"lift", to_string(c.lift.kind)}, {"indel_cost", c.lift.indel_cost},
            {"simtropic_identity", c.simtropic_identity}, {"seed", c.seed}};
    }

    CampaignConfig config_from_json(const json& doc, CampaignConfig c)
    {
        static const std::set<std::string> known = {"name", "budget", "power_bound", "schedule", "objective", "alpha", "bandwidth_adapt", "pareto",
            "refresh", "cell_arity", "beta", "epsilon", "scale", "max_bandwidth", "escape_low", "escape_high", "lift", "indel_cost", "simtropic_identity",
            "seed"};
        try {
            for (const auto& [key, value] : doc.items())
                if (!known.contains(key))
                    throw ParameterError("unknown configuration key '" + key + "'");
            auto read = [&](const char* key, auto& field) {
                if (doc.contains(key))
                    field = doc.at(key).get<std::decay_t<decltype(field)>>();
            };
            read("budget", c.budget);
            read("power_bound", c.power_bound);
            if (doc.contains("schedule"))
                c.schedule = power_schedule_from_string(doc.at("schedule").get<std::string>());
            if (doc.contains("objective"))
                c.objective = objective_from_string(doc.at("objective").get<std::string>());
            read("alpha", c.alpha);
            read("bandwidth_adapt", c.bandwidth_adapt);
            read("pareto", c.pareto_filter);
            read("refresh", c.refresh_every);
            read("cell_arity", c.cell_arity);
            read("beta", c.beta);
            read("epsilon", c.epsilon);
            read("scale", c.scale);
            read("max_bandwidth", c.max_bandwidth);
            read("escape_low", c.escape_low);
            read("escape_high", c.escape_high);
            if (doc.contains("lift"))
                c.lift.kind = lift_kind_from_string(doc.at("lift").get<std::string>());
            read("indel_cost", c.lift.indel_cost);
            read("simtropic_identity", c.simtropic_identity);
            read("seed", c.seed);
        }
        catch (const json::exception& e) {
            throw ParameterError(std::string("malformed configuration: ") + e.what());
        }
        c.validate();
        return c;
    }

    json result_to_json(const CampaignResult& r)
    {
        json archive = json::array();
        for (const auto& e : r.archive)
            archive.push_back({{"cell", cell_to_json(e.cell)}, {"input", e.input}, {"objective", e.objective}, {"bandwidth", e.bandwidth}});
        json batches = json::array();
        for (const auto& b : r.batches)
            batches.push_back({{"batch", b.batch}, {"parent_cell", cell_to_json(b.parent_cell)}, {"power", b.power}, {"bandwidth", b.bandwidth},
                {"next_bandwidth", b.next_bandwidth}, {"executed", b.executed}, {"escapes", b.escapes}, {"new_cells", b.new_cells},
                {"archive_size", b.archive_size}, {"covered_edges", b.covered_edges}, {"evaluations", b.evaluations}});
        const int final_coverage = r.coverage_curve.empty() ? r.initial_coverage : r.coverage_curve.back();
        return {{"config", config_to_json(r.config)}, {"coverage_curve", r.coverage_curve}, {"archive", archive},
            {"totals",
                {{"evaluations", r.total_evaluations}, {"initial_coverage", r.initial_coverage}, {"covered_edges", final_coverage},
                    {"coverable_edges", r.coverable_edges}, {"total_edges", r.total_edges}, {"archive_size", r.archive.size()},
                    {"normalized_coverage", r.coverable_edges > 0 ? static_cast<double>(final_coverage) / r.coverable_edges : 0.0}}},
            {"batches", batches}};
    }

    json load_json(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open '" + path.string() + "'");
        try {
            return json::parse(in);
        }
        catch (const json::exception& e) {
            throw IoError("cannot parse '" + path.string() + "': " + e.what());
        }
    }

    void save_text(const std::filesystem::path& path, const std::string& text)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot write '" + path.string() + "'");
        out << text;
    }

    void save_json(const std::filesystem::path& path, const json& doc) { save_text(path, doc.dump(2) + "\n"); }

    Program load_program(const std::filesystem::path& path) { return program_from_json(load_json(path)); }

    Corpus load_corpus(const std::filesystem::path& path) { return corpus_from_json(load_json(path)); }

} // namespace geofuzz
