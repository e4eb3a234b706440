#pragma once

#include <geofuzz/corpus.hpp>
#include <geofuzz/diversity.hpp>
#include <geofuzz/markov_geometry.hpp>
#include <geofuzz/objectives.hpp>
#include <geofuzz/path_space.hpp>
#include <geofuzz/toylang.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geofuzz {

    enum class PowerSchedule { Default, Entropic, Simtropic };

    const char* to_string(PowerSchedule schedule);
    PowerSchedule power_schedule_from_string(const std::string& name);

    struct CampaignConfig {
        long budget = 1000;
        int power_bound = 16;
        PowerSchedule schedule = PowerSchedule::Entropic;
        ObjectiveKind objective = ObjectiveKind::HitProbFromEntry;
        double alpha = 0.5;
        bool bandwidth_adapt = true;
        bool pareto_filter = false;
        int refresh_every = 50;
        int cell_arity = 2;
        double beta = 0.5;
        double epsilon = 0.5;
        // Similarity scale for magnitude computations; <= 0 selects 1/median distance.
        double scale = 0.0;
        // <= 0 selects the program's input length.
        int max_bandwidth = 0;
        double escape_low = 0.1;
        double escape_high = 0.9;
        PathDissimilarityConfig lift;
        // SIMTROPIC with the identity similarity; used to check it against ENTROPIC.
        bool simtropic_identity = false;
        std::uint64_t seed = 0;

        void validate() const;
    };

    /// Offspring cell -> count.
    using SpeciesCounts = std::map<CellKey, int>;

    struct Elite {
        std::uint64_t id = 0;
        InputVec input;
        Trace trace;
        PathSignature signature;
        // Distance from every vertex to the trace's vertex set under the current metric.
        Eigen::VectorXd profile;
        double objective = 0.0;
        CellKey cell;
        int bandwidth = 1;
        SpeciesCounts species;
        int last_batch_size = 0;
        int last_escapes = 0;
    };

    struct BatchRecord {
        long batch = 0;
        CellKey parent_cell;
        int power = 0;
        int bandwidth = 0;
        int next_bandwidth = 0;
        int executed = 0;
        int escapes = 0;
        int new_cells = 0;
        int archive_size = 0;
        int covered_edges = 0;
        long evaluations = 0;

        bool operator==(const BatchRecord&) const = default;
    };

    struct ArchiveEntry {
        CellKey cell;
        InputVec input;
        double objective = 0.0;
        int bandwidth = 1;

        bool operator==(const ArchiveEntry&) const = default;
    };

    struct CampaignResult {
        CampaignConfig config;
        std::vector<int> coverage_curve;
        int initial_coverage = 0;
        int coverable_edges = 0;
        int total_edges = 0;
        long total_evaluations = 0;
        std::vector<ArchiveEntry> archive;
        std::vector<BatchRecord> batches;
    };

    // Component operations, usable on their own.

    /// Go distribution over elites: alpha * w_hat + (1 - alpha) * q_hat, where w_hat is the
    /// clamped, renormalized magnitude weighting and q_hat the min-max normalized objective.
    std::vector<double> go_probabilities(const Eigen::VectorXd& magnitude_weights, const std::vector<double>& objectives, double alpha);

    std::size_t sample_index(const std::vector<double>& probabilities, Rng& rng);

    /// Entropy of an elite's add-one smoothed offspring distribution over `species`.
    double entropic_energy(const SpeciesCounts& counts, const std::vector<CellKey>& species);

    /// log of the order-1 diversity of the same distribution under similarity `z` (indexed like `species`).
    double simtropic_energy(const SpeciesCounts& counts, const std::vector<CellKey>& species, const Eigen::MatrixXd& z);

    /// clamp(round(m_max * energy / max_energy), 1, m_max); m_max when max_energy <= 0.
    int power_from_energy(double energy, double max_energy, int power_bound);

    std::vector<InputVec> mutate_batch(const InputVec& parent, int bandwidth, int count, int alphabet_size, Rng& rng);

    /// Indices of mutants on the Pareto front of (distance to nearest elite, distance to nearest other mutant).
    std::vector<std::size_t> pareto_filter(const std::vector<InputVec>& mutants, const std::vector<InputVec>& elites);

    /// Indices of the nondominated points (maximizing both coordinates); equal points do not dominate each other.
    std::vector<std::size_t> pareto_front(const std::vector<std::pair<double, double>>& scores);

    int update_bandwidth(int bandwidth, int escapes, int batch_size, int max_bandwidth, double escape_low = 0.1, double escape_high = 0.9);

    /// Owns one fuzz campaign: archive, edge statistics, geometry snapshot and RNG.
    class Campaign {
    public:
        Campaign(const Campaign&) = delete;
        Campaign& operator=(const Campaign&) = delete;

        /// Seeds the archive from the precomputed corpus; consumes no budget.
        Campaign(CampaignConfig config, const Program& program, const Corpus& corpus);

        const CampaignConfig& config() const { return _config; }
        const std::map<CellKey, Elite>& archive() const { return _archive; }
        long evaluations() const { return _evaluations; }
        int covered_edges() const { return _covered_count; }
        const std::vector<int>& coverage_curve() const { return _coverage_curve; }
        const std::vector<BatchRecord>& batches() const { return _batches; }
        const MetricMatrix<double>& vertex_metric() const { return _metric; }
        const Eigen::MatrixXd& edge_counts() const { return _counts; }
        const Eigen::VectorXd& potentials() const { return _potentials; }
        int landmark_count() const { return static_cast<int>(_landmarks.size()); }
        int cell_arity() const { return _arity; }
        int max_bandwidth() const { return _max_bandwidth; }
        std::size_t species_count() const { return _species.size(); }

        /// Distances from a path to every landmark under the current geometry.
        Eigen::VectorXd landmark_distances(const PathSignature& path, const Eigen::VectorXd& profile) const;
        Eigen::VectorXd profile_of(const PathSignature& path) const;
        CellKey cell_of(const PathSignature& path) const;

        std::vector<double> go_distribution();
        const Elite& go_select();
        int power_schedule(const Elite& elite);

        /// Executes at most the remaining budget from one selected elite. Returns false once exhausted.
        bool step();

        /// Folds executed offspring into the archive; `parent_bandwidth` seeds new elites.
        /// Returns the number of newly populated cells.
        int assimilate(const std::vector<std::pair<InputVec, Trace>>& offspring, int parent_bandwidth);

        /// Re-estimates the chain and re-keys every elite. Keeps the previous geometry on numerical failure.
        void refresh_geometry();

        CampaignResult run();
        CampaignResult result() const;

    private:
        struct Landmark {
            PathSignature signature;
            Eigen::VectorXd profile;
        };

        struct Species {
            PathSignature signature;
            Eigen::VectorXd profile;
        };

        double _path_distance(const PathSignature& a, const Eigen::VectorXd& pa, const PathSignature& b, const Eigen::VectorXd& pb) const;
        bool _compute_geometry();
        void _record_evaluation(const Trace& trace);
        Elite _make_elite(InputVec input, Trace trace, int bandwidth);
        int _assimilate(std::vector<Elite> children);
        const Eigen::MatrixXd& _species_similarity();

        CampaignConfig _config;
        const Program* _program;
        Rng _rng;

        int _arity = 1;
        int _max_bandwidth = 1;
        Eigen::MatrixXd _adjacency;
        Eigen::MatrixXd _counts;
        std::vector<char> _covered;
        int _covered_count = 0;
        int _initial_coverage = 0;
        long _evaluations = 0;
        long _next_refresh = 0;
        std::uint64_t _next_id = 0;

        MarkovChain<double> _chain;
        MetricMatrix<double> _metric;
        double _indel = 0.0;
        Eigen::VectorXd _potentials;
        std::vector<Landmark> _landmarks;

        std::map<CellKey, Elite> _archive;
        std::map<CellKey, Species> _species;
        std::vector<int> _coverage_curve;
        std::vector<BatchRecord> _batches;

        // Invalidated whenever the archive or geometry changes.
        std::optional<std::vector<double>> _go_cache;
        std::optional<Eigen::MatrixXd> _species_z;
    };

    CampaignResult run_campaign(const CampaignConfig& config, const Program& program, const Corpus& corpus);

} // namespace geofuzz
