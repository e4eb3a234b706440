#include <geofuzz/harness.hpp>

#include <geofuzz/error.hpp>
#include <geofuzz/serialization.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace geofuzz {

    void ExperimentGrid::validate() const
    {
        if (programs.empty())
            throw ParameterError("grid: program list is empty");
        if (configs.empty())
            throw ParameterError("grid: configuration list is empty");
        if (objectives.empty())
            throw ParameterError("grid: objective list is empty");
        if (campaigns < 1)
            throw ParameterError("grid: campaigns must be at least 1");
        if (budget < 0)
            throw ParameterError("grid: budget must be nonnegative");
        if (stride < 1)
            throw ParameterError("grid: stride must be at least 1");
        std::set<std::string> ids;
        for (const auto& p : programs)
            if (!ids.insert(p.id).second)
                throw ParameterError("grid: duplicate program id '" + p.id + "'");
        std::set<std::string> names;
        for (const auto& c : configs)
            if (!names.insert(c.name).second)
                throw ParameterError("grid: duplicate configuration name '" + c.name + "'");
    }

    ExperimentGrid load_grid(const std::filesystem::path& path)
    {
        const json doc = load_json(path);
        const auto base = path.parent_path();
        auto resolve = [&](const std::string& p) {
            std::filesystem::path fp(p);
            return fp.is_absolute() ? fp : base / fp;
        };

        ExperimentGrid grid;
        try {
            for (const auto& entry : doc.at("programs")) {
                GridProgram gp;
                if (entry.is_string()) {
                    gp.program_path = resolve(entry.get<std::string>());
                    gp.id = gp.program_path.stem().string();
                }
                else {
                    gp.program_path = resolve(entry.at("program").get<std::string>());
                    gp.id = entry.value("id", gp.program_path.stem().string());
                    if (entry.contains("corpus"))
                        gp.corpus_path = resolve(entry.at("corpus").get<std::string>());
                }
                grid.programs.push_back(std::move(gp));
            }
            for (const auto& entry : doc.at("configs")) {
                GridConfig gc;
                gc.name = entry.at("name").get<std::string>();
                gc.config = config_from_json(entry);
                grid.configs.push_back(std::move(gc));
            }
            for (const auto& o : doc.at("objectives"))
                grid.objectives.push_back(objective_from_string(o.get<std::string>()));
            grid.campaigns = doc.value("campaigns", 1);
            grid.budget = doc.value("budget", 1000L);
            grid.seed = doc.value("seed", std::uint64_t{0});
            grid.parallel = doc.value("parallel", 1);
            grid.stride = doc.value("stride", 10);
            if (doc.contains("bootstrap")) {
                const json& b = doc.at("bootstrap");
                grid.bootstrap.candidates = b.value("candidates", grid.bootstrap.candidates);
                grid.bootstrap.landmarks = b.value("landmarks", grid.bootstrap.landmarks);
            }
        }
        catch (const json::exception& e) {
            throw ParameterError("malformed grid '" + path.string() + "': " + e.what());
        }
        grid.validate();
        return grid;
    }

    std::uint64_t campaign_seed(std::uint64_t base, const std::string& program_id, const std::string& config_id, const std::string& objective, int campaign)
    {
        const std::string key = program_id + "|" + config_id + "|" + objective + "|" + std::to_string(campaign);
        std::uint64_t h = 14695981039346656037ULL;
        for (unsigned char c : key) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return base + h;
    }

    std::vector<LoadedProgram> load_programs(const ExperimentGrid& grid)
    {
        std::vector<LoadedProgram> out;
        for (const auto& gp : grid.programs) {
            LoadedProgram lp;
            lp.id = gp.id;
            lp.program = load_program(gp.program_path);
            if (gp.corpus_path.empty()) {
                BootstrapParams params = grid.bootstrap;
                params.seed = campaign_seed(grid.seed, gp.id, "bootstrap", "", 0);
                lp.corpus = bootstrap_corpus(lp.program, params);
            }
            else {
                lp.corpus = load_corpus(gp.corpus_path);
            }
            out.push_back(std::move(lp));
        }
        return out;
    }

    std::vector<long> stride_points(long budget, int stride)
    {
        if (budget <= 0)
            return {0};
        std::vector<long> points;
        for (long e = stride; e <= budget; e += stride)
            points.push_back(e);
        if (points.empty() || points.back() != budget)
            points.push_back(budget);
        return points;
    }

    int worker_width(int requested)
    {
        if (const char* env = std::getenv("GEOFUZZ_PARALLEL")) {
            const int w = std::atoi(env);
            if (w >= 1)
                return w;
        }
        return std::max(1, requested);
    }

    namespace {

        struct Task {
            std::size_t program;
            std::size_t config;
            std::size_t objective;
            int campaign;
        };

        struct Outcome {
            std::vector<int> coverage_curve;
            int initial_coverage = 0;
            int total_edges = 0;
            std::string error;
        };

    } // namespace

    ExperimentResults run_experiment(const ExperimentGrid& grid, const std::vector<LoadedProgram>& programs)
    {
        grid.validate();
        if (programs.size() != grid.programs.size())
            throw ParameterError("run_experiment: loaded programs do not match the grid");

        std::vector<Task> tasks;
        for (std::size_t p = 0; p < programs.size(); ++p)
            for (std::size_t c = 0; c < grid.configs.size(); ++c)
                for (std::size_t o = 0; o < grid.objectives.size(); ++o)
                    for (int k = 0; k < grid.campaigns; ++k)
                        tasks.push_back({p, c, o, k});

        std::vector<Outcome> outcomes(tasks.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next++; i < tasks.size(); i = next++) {
                const Task& t = tasks[i];
                const LoadedProgram& lp = programs[t.program];
                CampaignConfig config = grid.configs[t.config].config;
                config.budget = grid.budget;
                config.objective = grid.objectives[t.objective];
                config.seed = campaign_seed(grid.seed, lp.id, grid.configs[t.config].name, to_string(config.objective), t.campaign);
                Outcome& out = outcomes[i];
                out.total_edges = lp.program.cfg.edge_count();
                try {
                    Campaign campaign(config, lp.program, lp.corpus);
                    campaign.run();
                    out.coverage_curve = campaign.coverage_curve();
                    out.initial_coverage = campaign.result().initial_coverage;
                }
                catch (const std::exception& e) {
                    out.error = e.what();
                }
            }
        };

        const int width = std::min<int>(worker_width(grid.parallel), static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
        if (width <= 1) {
            worker();
        }
        else {
            std::vector<std::thread> pool;
            for (int w = 0; w < width; ++w)
                pool.emplace_back(worker);
            for (auto& th : pool)
                th.join();
        }

        ExperimentResults results;
        results.campaign_count = tasks.size();
        const std::vector<long> points = stride_points(grid.budget, grid.stride);
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const Task& t = tasks[i];
            const Outcome& out = outcomes[i];
            ResultRow base{programs[t.program].id, grid.configs[t.config].name, to_string(grid.objectives[t.objective]), t.campaign, 0, 0, out.total_edges};
            if (!out.error.empty()) {
                base.evaluation = -1;
                base.covered_edges = -1;
                results.rows.push_back(base);
                results.failures.push_back({base.program_id, base.config_id, base.objective, base.campaign, out.error});
                continue;
            }
            for (long e : points) {
                ResultRow row = base;
                row.evaluation = e;
                row.covered_edges = e == 0 ? out.initial_coverage : out.coverage_curve[static_cast<std::size_t>(e - 1)];
                results.rows.push_back(std::move(row));
            }
        }
        return results;
    }

    ExperimentResults run_experiment(const ExperimentGrid& grid) { return run_experiment(grid, load_programs(grid)); }

    std::string results_to_csv(const std::vector<ResultRow>& rows)
    {
        std::ostringstream out;
        out << results_csv_header << "\n";
        for (const auto& r : rows)
            out << r.program_id << ',' << r.config_id << ',' << r.objective << ',' << r.campaign << ',' << r.evaluation << ',' << r.covered_edges << ','
                << r.total_edges << "\n";
        return out.str();
    }

    std::vector<ResultRow> results_from_csv(const std::string& text)
    {
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line) || line != results_csv_header)
            throw DataError("results CSV: unexpected header");
        std::vector<ResultRow> rows;
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty())
                continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string f;
            while (std::getline(ss, f, ','))
                fields.push_back(f);
            if (fields.size() != 7)
                throw DataError("results CSV line " + std::to_string(line_no) + ": expected 7 fields");
            try {
                rows.push_back({fields[0], fields[1], fields[2], std::stoi(fields[3]), std::stol(fields[4]), std::stoi(fields[5]), std::stoi(fields[6])});
            }
            catch (const std::exception&) {
                throw DataError("results CSV line " + std::to_string(line_no) + ": malformed number");
            }
        }
        return rows;
    }

    void write_results(const std::filesystem::path& path, const ExperimentResults& results)
    {
        save_text(path, results_to_csv(results.rows));
        json failures = json::array();
        for (const auto& f : results.failures)
            failures.push_back({{"program_id", f.program_id}, {"config_id", f.config_id}, {"objective", f.objective}, {"campaign", f.campaign},
                {"message", f.message}});
        json meta = {{"campaigns", results.campaign_count}, {"rows", results.rows.size()}, {"failures", failures}};
        const auto now = std::chrono::system_clock::now();
        meta["written_at_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
        save_json(path.string() + ".meta.json", meta);
    }

    namespace {

        std::pair<double, double> mean_std(const std::vector<double>& xs)
        {
            double mean = 0.0;
            for (double x : xs)
                mean += x;
            mean /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs)
                var += (x - mean) * (x - mean);
            return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
        }

        std::string fmt(double x)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", x);
            return buf;
        }

    } // namespace

    Report summarize(const std::vector<ResultRow>& rows)
    {
        std::map<std::string, int> totals;
        using CampaignId = std::tuple<std::string, std::string, std::string, int>;
        std::map<CampaignId, const ResultRow*> finals;
        std::map<std::tuple<std::string, std::string, long>, std::vector<double>> curve_samples;

        for (const auto& r : rows) {
            if (r.failed())
                continue;
            auto [it, inserted] = totals.emplace(r.program_id, r.total_edges);
            if (!inserted && it->second != r.total_edges)
                throw DataError("program '" + r.program_id + "' reports inconsistent edge totals");
            if (r.total_edges < 2)
                throw DataError("program '" + r.program_id + "' has fewer than two edges");
            const double normalized = static_cast<double>(r.covered_edges) / static_cast<double>(r.total_edges - 1);
            curve_samples[{r.config_id, r.objective, r.evaluation}].push_back(normalized);
            const CampaignId id{r.program_id, r.config_id, r.objective, r.campaign};
            auto f = finals.find(id);
            if (f == finals.end() || f->second->evaluation < r.evaluation)
                finals[id] = &r;
        }

        Report report;
        for (const auto& [key, xs] : curve_samples) {
            const auto [mean, sd] = mean_std(xs);
            report.curves.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), mean, sd, xs.size()});
        }
        std::map<std::pair<std::string, std::string>, std::vector<double>> final_samples;
        for (const auto& [id, r] : finals)
            final_samples[{r->config_id, r->objective}].push_back(static_cast<double>(r->covered_edges) / static_cast<double>(r->total_edges - 1));
        for (const auto& [key, xs] : final_samples) {
            const auto [mean, sd] = mean_std(xs);
            report.summary.push_back({key.first, key.second, mean, sd, xs.size()});
        }
        return report;
    }

    std::string curves_to_csv(const std::vector<CurvePoint>& curves)
    {
        std::ostringstream out;
        out << "config_id,objective,evaluation,mean_coverage,std_coverage,n\n";
        for (const auto& c : curves)
            out << c.config_id << ',' << c.objective << ',' << c.evaluation << ',' << fmt(c.mean) << ',' << fmt(c.std) << ',' << c.count << "\n";
        return out.str();
    }

    std::string summary_to_csv(const std::vector<SummaryRow>& summary)
    {
        std::ostringstream out;
        out << "config_id,objective,mean_coverage,std_coverage,n\n";
        for (const auto& s : summary)
            out << s.config_id << ',' << s.objective << ',' << fmt(s.mean) << ',' << fmt(s.std) << ',' << s.count << "\n";
        return out.str();
    }

} // namespace geofuzz
