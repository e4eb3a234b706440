#include <geofuzz/corpus.hpp>
#include <geofuzz/error.hpp>
#include <geofuzz/fuzz_core.hpp>
#include <geofuzz/harness.hpp>
#include <geofuzz/markov_geometry.hpp>
#include <geofuzz/serialization.hpp>
#include <geofuzz/toylang.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace geofuzz;

namespace {

    bool parse_switch(const std::string& v)
    {
        if (v == "on" || v == "true" || v == "1")
            return true;
        if (v == "off" || v == "false" || v == "0")
            return false;
        throw ParameterError("expected on/off, got '" + v + "'");
    }

    // Accepts a corpus-like document: "traces" as vertex lists, or "inputs" to execute.
    std::vector<Trace> load_traces(const std::filesystem::path& path, const Program& program)
    {
        const json doc = load_json(path);
        std::vector<Trace> traces;
        try {
            if (doc.contains("traces")) {
                for (const auto& t : doc.at("traces"))
                    traces.push_back(Trace{t.get<std::vector<VertexId>>()});
            }
            else {
                for (const auto& in : doc.at("inputs"))
                    traces.push_back(execute(program, in.get<InputVec>()));
            }
        }
        catch (const json::exception& e) {
            throw ParameterError("malformed traces file '" + path.string() + "': " + e.what());
        }
        return traces;
    }

    void append_metric(std::ostringstream& out, const MetricMatrix<double>& m)
    {
        char buf[64];
        for (Eigen::Index i = 0; i < m.size(); ++i)
            for (Eigen::Index j = 0; j < m.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
                out << to_string(m.kind) << ',' << i << ',' << j << ',' << buf << "\n";
            }
    }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"geofuzz: directed greybox fuzzing with geometric diversity"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate random toy programs");
    int n_programs = 1;
    GenParams gp;
    std::string gen_out = ".";
    gen->add_option("--n-programs", n_programs)->check(CLI::PositiveNumber);
    gen->add_option("--seed", gp.seed);
    gen->add_option("--alphabet", gp.alphabet_size);
    gen->add_option("--max-statements", gp.max_statements);
    gen->add_option("--max-depth", gp.max_depth);
    gen->add_option("--out", gen_out)->required();

    // metrics
    auto* met = app.add_subcommand("metrics", "vertex metrics of a program's CFG walk");
    std::string met_program, met_traces, met_out;
    double met_beta = 0.5, met_eps = 0.5;
    met->add_option("--program", met_program)->required();
    met->add_option("--traces", met_traces);
    met->add_option("--beta", met_beta);
    met->add_option("--epsilon", met_eps);
    met->add_option("--out", met_out)->required();

    // bootstrap
    auto* boot = app.add_subcommand("bootstrap", "build an initial corpus and landmark set");
    std::string boot_program, boot_out, boot_lift = "hausdorff";
    BootstrapParams bp;
    boot->add_option("--program", boot_program)->required();
    boot->add_option("--candidates", bp.candidates);
    boot->add_option("--landmarks", bp.landmarks);
    boot->add_option("--beta", bp.beta);
    boot->add_option("--epsilon", bp.epsilon);
    boot->add_option("--lift", boot_lift);
    boot->add_option("--seed", bp.seed);
    boot->add_option("--out", boot_out)->required();

    // run
    auto* run = app.add_subcommand("run", "run one fuzz campaign");
    std::string run_program, run_corpus, run_out, run_schedule = "entropic", run_objective = "hitprob", run_bw = "on", run_pareto = "off",
                                                  run_lift = "hausdorff";
    CampaignConfig rc;
    run->add_option("--program", run_program)->required();
    run->add_option("--corpus", run_corpus, "corpus JSON; bootstrapped from the seed when omitted");
    run->add_option("--budget", rc.budget);
    run->add_option("--schedule", run_schedule);
    run->add_option("--objective", run_objective);
    run->add_option("--bandwidth-adapt", run_bw);
    run->add_option("--pareto", run_pareto);
    run->add_option("--alpha", rc.alpha);
    run->add_option("--power-bound", rc.power_bound);
    run->add_option("--refresh", rc.refresh_every);
    run->add_option("--cell-arity", rc.cell_arity);
    run->add_option("--beta", rc.beta);
    run->add_option("--epsilon", rc.epsilon);
    run->add_option("--lift", run_lift);
    run->add_option("--seed", rc.seed);
    run->add_option("--out", run_out)->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a grid of campaigns");
    std::string grid_path, exp_out;
    exp->add_option("--grid", grid_path)->required();
    exp->add_option("--out", exp_out)->required();

    // report
    auto* rep = app.add_subcommand("report", "aggregate experiment results");
    std::string rep_in, rep_curves, rep_summary;
    rep->add_option("--in", rep_in)->required();
    rep->add_option("--curves", rep_curves)->required();
    rep->add_option("--summary", rep_summary)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const std::filesystem::path dir(gen_out);
            std::filesystem::create_directories(dir);
            for (int k = 0; k < n_programs; ++k) {
                GenParams p = gp;
                p.seed = gp.seed + static_cast<std::uint64_t>(k);
                const Program program = generate_program(p);
                char stem[32];
                std::snprintf(stem, sizeof stem, "program_%03d", k);
                save_json(dir / (std::string(stem) + ".json"), program_to_json(program));
                save_text(dir / (std::string(stem) + ".txt"), pretty_print(program));
                std::cout << stem << ": " << program.cfg.vertex_count() << " vertices, " << program.cfg.edge_count() << " edges, L="
                          << program.input_length << "\n";
            }
        }
        else if (*met) {
            const Program program = load_program(met_program);
            const Eigen::MatrixXd adj = program.cfg.adjacency();
            Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(adj.rows(), adj.cols());
            if (!met_traces.empty())
                for (const auto& t : load_traces(met_traces, program))
                    accumulate_edge_counts(counts, t);
            const auto chain = estimate_chain(counts, adj, met_eps);
            // smoothed counts as weights when traces are given, structure otherwise
            const Eigen::MatrixXd weights = met_traces.empty() ? adj : Eigen::MatrixXd(counts + met_eps * adj);
            std::ostringstream out;
            out << "kind,source_vertex,target_vertex,distance\n";
            append_metric(out, hitting_prob_metric(chain, met_beta));
            append_metric(out, commute_time_metric(chain));
            append_metric(out, resistance_metric(weights));
            save_text(met_out, out.str());
        }
        else if (*boot) {
            const Program program = load_program(boot_program);
            bp.lift.kind = lift_kind_from_string(boot_lift);
            save_json(boot_out, corpus_to_json(bootstrap_corpus(program, bp)));
        }
        else if (*run) {
            const Program program = load_program(run_program);
            rc.schedule = power_schedule_from_string(run_schedule);
            rc.objective = objective_from_string(run_objective);
            rc.bandwidth_adapt = parse_switch(run_bw);
            rc.pareto_filter = parse_switch(run_pareto);
            rc.lift.kind = lift_kind_from_string(run_lift);
            Corpus corpus;
            if (run_corpus.empty()) {
                BootstrapParams p;
                p.beta = rc.beta;
                p.epsilon = rc.epsilon;
                p.lift = rc.lift;
                p.seed = rc.seed;
                corpus = bootstrap_corpus(program, p);
            }
            else {
                corpus = load_corpus(run_corpus);
            }
            const CampaignResult result = run_campaign(rc, program, corpus);
            save_json(run_out, result_to_json(result));
            const int final_cov = result.coverage_curve.empty() ? result.initial_coverage : result.coverage_curve.back();
            std::cout << "covered " << final_cov << "/" << result.coverable_edges << " edges in " << result.total_evaluations << " evaluations, "
                      << result.archive.size() << " cells\n";
        }
        else if (*exp) {
            const ExperimentGrid grid = load_grid(grid_path);
            const ExperimentResults results = run_experiment(grid);
            write_results(exp_out, results);
            for (const auto& f : results.failures)
                std::cerr << "campaign failed: " << f.program_id << "/" << f.config_id << "/" << f.objective << "/" << f.campaign << ": " << f.message << "\n";
            std::cout << results.campaign_count << " campaigns, " << results.failures.size() << " failed\n";
        }
        else if (*rep) {
            std::ifstream in(rep_in);
            if (!in)
                throw IoError("cannot open '" + rep_in + "'");
            std::stringstream buf;
            buf << in.rdbuf();
            const Report report = summarize(results_from_csv(buf.str()));
            save_text(rep_curves, curves_to_csv(report.curves));
            save_text(rep_summary, summary_to_csv(report.summary));
        }
    }
    catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
