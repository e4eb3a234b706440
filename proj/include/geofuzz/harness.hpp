#pragma once

#include <geofuzz/corpus.hpp>
#include <geofuzz/fuzz_core.hpp>
#include <geofuzz/objectives.hpp>
#include <geofuzz/toylang.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace geofuzz {

    inline constexpr const char* results_csv_header = "program_id,config_id,objective,campaign,evaluation,covered_edges,total_edges";

    struct GridProgram {
        std::string id;
        std::filesystem::path program_path;
        // Empty: the corpus is bootstrapped from the program.
        std::filesystem::path corpus_path;
    };

    /// Named flag bundle; budget, objective and seed are set per grid cell.
    struct GridConfig {
        std::string name;
        CampaignConfig config;
    };

    struct ExperimentGrid {
        std::vector<GridProgram> programs;
        std::vector<GridConfig> configs;
        std::vector<ObjectiveKind> objectives;
        int campaigns = 1;
        long budget = 1000;
        std::uint64_t seed = 0;
        int parallel = 1;
        int stride = 10;
        BootstrapParams bootstrap;

        void validate() const;
    };

    /// A program ready to fuzz, with its corpus.
    struct LoadedProgram {
        std::string id;
        Program program;
        Corpus corpus;
    };

    struct ResultRow {
        std::string program_id;
        std::string config_id;
        std::string objective;
        int campaign = 0;
        long evaluation = 0;
        int covered_edges = 0;
        int total_edges = 0;

        bool failed() const { return evaluation < 0; }
        bool operator==(const ResultRow&) const = default;
    };

    struct CampaignFailure {
        std::string program_id;
        std::string config_id;
        std::string objective;
        int campaign = 0;
        std::string message;
    };

    struct ExperimentResults {
        std::vector<ResultRow> rows;
        std::vector<CampaignFailure> failures;
        std::size_t campaign_count = 0;
    };

    /// Relative paths resolve against the grid file's directory.
    ExperimentGrid load_grid(const std::filesystem::path& path);

    std::vector<LoadedProgram> load_programs(const ExperimentGrid& grid);

    /// base_seed + FNV-1a of "program|config|objective|campaign".
    std::uint64_t campaign_seed(std::uint64_t base, const std::string& program_id, const std::string& config_id, const std::string& objective, int campaign);

    /// Evaluations at which a row is emitted: every `stride`, plus the final one.
    std::vector<long> stride_points(long budget, int stride);

    /// Worker width: GEOFUZZ_PARALLEL when set, otherwise `requested`.
    int worker_width(int requested);

    ExperimentResults run_experiment(const ExperimentGrid& grid, const std::vector<LoadedProgram>& programs);
    ExperimentResults run_experiment(const ExperimentGrid& grid);

    std::string results_to_csv(const std::vector<ResultRow>& rows);
    std::vector<ResultRow> results_from_csv(const std::string& text);
    void write_results(const std::filesystem::path& path, const ExperimentResults& results);

    struct CurvePoint {
        std::string config_id;
        std::string objective;
        long evaluation = 0;
        double mean = 0.0;
        double std = 0.0;
        std::size_t count = 0;
    };

    struct SummaryRow {
        std::string config_id;
        std::string objective;
        double mean = 0.0;
        double std = 0.0;
        std::size_t count = 0;
    };

    struct Report {
        std::vector<CurvePoint> curves;
        std::vector<SummaryRow> summary;
    };

    /// Normalized coverage covered / (total - 1), aggregated over programs and campaigns.
    /// Throws DataError if one program reports different edge totals.
    Report summarize(const std::vector<ResultRow>& rows);
    std::string curves_to_csv(const std::vector<CurvePoint>& curves);
    std::string summary_to_csv(const std::vector<SummaryRow>& summary);

} // namespace geofuzz
