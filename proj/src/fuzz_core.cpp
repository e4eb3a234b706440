#include <geofuzz/fuzz_core.hpp>

#include <geofuzz/error.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace geofuzz {

    const char* to_string(PowerSchedule schedule)
    {
        switch (schedule) {
        case PowerSchedule::Default:
            return "default";
        case PowerSchedule::Entropic:
            return "entropic";
        case PowerSchedule::Simtropic:
            return "simtropic";
        }
        return "?";
    }

    PowerSchedule power_schedule_from_string(const std::string& name)
    {
        for (auto s : {PowerSchedule::Default, PowerSchedule::Entropic, PowerSchedule::Simtropic})
            if (name == to_string(s))
                return s;
        throw ParameterError("unknown power schedule '" + name + "'");
    }

    void CampaignConfig::validate() const
    {
        if (budget < 0)
            throw ParameterError("budget must be nonnegative");
        if (power_bound < 1)
            throw ParameterError("power bound must be at least 1");
        if (refresh_every < 1)
            throw ParameterError("refresh cadence must be at least 1");
        if (cell_arity < 1)
            throw ParameterError("cell arity must be at least 1");
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw ParameterError("alpha must lie in [0,1]");
        if (!(beta > 0.0 && beta < 1.0))
            throw ParameterError("beta must lie in (0,1)");
        if (!(epsilon > 0.0))
            throw ParameterError("epsilon must be positive");
        if (!(escape_low >= 0.0 && escape_low <= escape_high && escape_high <= 1.0))
            throw ParameterError("escape thresholds must satisfy 0 <= low <= high <= 1");
    }

    std::vector<double> go_probabilities(const Eigen::VectorXd& magnitude_weights, const std::vector<double>& objectives, double alpha)
    {
        const std::size_t k = objectives.size();
        if (k == 0)
            throw StateError("go distribution over an empty archive");
        if (static_cast<std::size_t>(magnitude_weights.size()) != k)
            throw ParameterError("go_probabilities: weights and objectives differ in length");
        const double uniform = 1.0 / static_cast<double>(k);

        std::vector<double> w(k), q(k), p(k);
        double w_total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            w[i] = std::max(0.0, magnitude_weights(static_cast<Eigen::Index>(i)));
            w_total += w[i];
        }
        for (auto& x : w)
            x = w_total > 0.0 ? x / w_total : uniform;

        const auto [lo, hi] = std::minmax_element(objectives.begin(), objectives.end());
        const double range = *hi - *lo;
        double q_total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            q[i] = range > 0.0 ? (objectives[i] - *lo) / range : 1.0;
            q_total += q[i];
        }
        for (auto& x : q)
            x /= q_total;

        for (std::size_t i = 0; i < k; ++i)
            p[i] = alpha * w[i] + (1.0 - alpha) * q[i];
        return p;
    }

    std::size_t sample_index(const std::vector<double>& probabilities, Rng& rng)
    {
        double total = 0.0;
        for (double x : probabilities)
            total += x;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double u = unit(rng) * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < probabilities.size(); ++i) {
            if (probabilities[i] <= 0.0)
                continue;
            acc += probabilities[i];
            last_positive = i;
            if (u < acc)
                return i;
        }
        return last_positive;
    }

    namespace {

        Eigen::VectorXd smoothed_distribution(const SpeciesCounts& counts, const std::vector<CellKey>& species)
        {
            const Eigen::Index s = static_cast<Eigen::Index>(species.size());
            Eigen::VectorXd p(s);
            double total = 0.0;
            for (Eigen::Index i = 0; i < s; ++i) {
                auto it = counts.find(species[static_cast<std::size_t>(i)]);
                p(i) = 1.0 + (it == counts.end() ? 0 : it->second);
                total += p(i);
            }
            return p / total;
        }

    } // namespace

    double entropic_energy(const SpeciesCounts& counts, const std::vector<CellKey>& species)
    {
        if (species.empty())
            return 0.0;
        return shannon_entropy(smoothed_distribution(counts, species));
    }

    double simtropic_energy(const SpeciesCounts& counts, const std::vector<CellKey>& species, const Eigen::MatrixXd& z)
    {
        if (species.empty())
            return 0.0;
        return log_diversity_order_1(z, smoothed_distribution(counts, species));
    }

    int power_from_energy(double energy, double max_energy, int power_bound)
    {
        if (!(max_energy > 0.0))
            return power_bound;
        const long power = std::lround(static_cast<double>(power_bound) * energy / max_energy);
        return static_cast<int>(std::clamp<long>(power, 1, power_bound));
    }

    std::vector<InputVec> mutate_batch(const InputVec& parent, int bandwidth, int count, int alphabet_size, Rng& rng)
    {
        std::vector<InputVec> out;
        out.reserve(static_cast<std::size_t>(std::max(count, 0)));
        for (int i = 0; i < count; ++i) {
            InputVec m = parent;
            for (int b = 0; b < bandwidth; ++b)
                m = atomic_mutate(m, alphabet_size, rng);
            out.push_back(std::move(m));
        }
        return out;
    }

    std::vector<std::size_t> pareto_front(const std::vector<std::pair<double, double>>& scores)
    {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < scores.size() && !dominated; ++j) {
                if (j == i)
                    continue;
                const auto& a = scores[j];
                const auto& b = scores[i];
                dominated = a.first >= b.first && a.second >= b.second && (a.first > b.first || a.second > b.second);
            }
            if (!dominated)
                keep.push_back(i);
        }
        return keep;
    }

    std::vector<std::size_t> pareto_filter(const std::vector<InputVec>& mutants, const std::vector<InputVec>& elites)
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, double>> scores(mutants.size(), {inf, inf});
        for (std::size_t i = 0; i < mutants.size(); ++i) {
            for (const auto& e : elites)
                scores[i].first = std::min(scores[i].first, static_cast<double>(input_distance(mutants[i], e)));
            for (std::size_t j = 0; j < mutants.size(); ++j)
                if (j != i)
                    scores[i].second = std::min(scores[i].second, static_cast<double>(input_distance(mutants[i], mutants[j])));
        }
        return pareto_front(scores);
    }

    int update_bandwidth(int bandwidth, int escapes, int batch_size, int max_bandwidth, double escape_low, double escape_high)
    {
        if (batch_size <= 0)
            return bandwidth;
        const double rate = static_cast<double>(escapes) / static_cast<double>(batch_size);
        if (rate > escape_high)
            return std::max(1, bandwidth / 2);
        if (rate < escape_low)
            return std::min(max_bandwidth, bandwidth + 1);
        return bandwidth;
    }

    namespace {

        void check_walk(const Cfg& cfg, const Trace& trace)
        {
            if (trace.vertices.empty() || trace.vertices.front() != cfg.entry || trace.vertices.back() != cfg.exit)
                throw ParameterError("corpus trace must run from entry to exit");
            for (std::size_t i = 1; i < trace.vertices.size(); ++i)
                if (!cfg.has_edge(trace.vertices[i - 1], trace.vertices[i]))
                    throw ParameterError("corpus trace uses a non-edge");
        }

    } // namespace

    Campaign::Campaign(CampaignConfig config, const Program& program, const Corpus& corpus)
        : _config(std::move(config)), _program(&program), _rng(_config.seed)
    {
        _config.validate();
        if (corpus.inputs.empty())
            throw ParameterError("campaign needs a nonempty corpus");
        if (corpus.inputs.size() != corpus.traces.size())
            throw ParameterError("corpus inputs and traces differ in number");
        if (corpus.landmark_indices.empty())
            throw ParameterError("corpus has no landmarks");
        for (int i : corpus.landmark_indices)
            if (i < 0 || static_cast<std::size_t>(i) >= corpus.traces.size())
                throw ParameterError("corpus landmark index out of range");

        const Cfg& cfg = program.cfg;
        const int n = cfg.vertex_count();
        _arity = std::min(_config.cell_arity, static_cast<int>(corpus.landmark_indices.size()));
        _max_bandwidth = _config.max_bandwidth > 0 ? _config.max_bandwidth : std::max(1, program.input_length);
        _adjacency = cfg.adjacency();
        _counts = Eigen::MatrixXd::Zero(n, n);
        _covered.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);

        for (std::size_t i = 0; i < corpus.traces.size(); ++i) {
            check_walk(cfg, corpus.traces[i]);
            if (static_cast<int>(corpus.inputs[i].size()) != program.input_length)
                throw ParameterError("corpus input length does not match the program");
            accumulate_edge_counts(_counts, corpus.traces[i]);
            for (const auto& [u, v] : corpus.traces[i].edge_sequence()) {
                char& c = _covered[static_cast<std::size_t>(u) * n + v];
                if (!c) {
                    c = 1;
                    ++_covered_count;
                }
            }
        }
        _initial_coverage = _covered_count;

        for (int i : corpus.landmark_indices)
            _landmarks.push_back({PathSignature::from_trace(corpus.traces[i]), {}});
        if (!_compute_geometry())
            throw NumericalError("campaign: initial geometry could not be computed");

        for (std::size_t i = 0; i < corpus.inputs.size(); ++i) {
            Elite e = _make_elite(corpus.inputs[i], corpus.traces[i], 1);
            auto it = _archive.find(e.cell);
            if (it == _archive.end())
                _archive.emplace(e.cell, std::move(e));
            else if (e.objective > it->second.objective)
                it->second = std::move(e);
        }
        _next_refresh = _config.refresh_every;
    }

    bool Campaign::_compute_geometry()
    {
        try {
            _chain = estimate_chain(_counts, _adjacency, _config.epsilon);
            _metric = hitting_prob_metric(_chain, _config.beta);
        }
        catch (const NumericalError& e) {
            std::cerr << "geofuzz: keeping previous geometry: " << e.what() << "\n";
            return false;
        }
        _indel = _config.lift.indel_cost >= 0 ? _config.lift.indel_cost : default_indel_cost(_metric);
        _potentials = vertex_potential(_config.objective, _program->cfg, &_metric);
        for (auto& lm : _landmarks)
            lm.profile = profile_of(lm.signature);
        for (auto& [key, sp] : _species)
            sp.profile = profile_of(sp.signature);
        _go_cache.reset();
        _species_z.reset();
        return true;
    }

    Eigen::VectorXd Campaign::profile_of(const PathSignature& path) const
    {
        if (_config.lift.kind != LiftKind::Hausdorff)
            return {};
        const Eigen::Index n = _metric.size();
        Eigen::VectorXd profile = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
        for (VertexId s : path.vertex_set)
            profile = profile.cwiseMin(_metric.distances.col(s));
        return profile;
    }

    double Campaign::_path_distance(const PathSignature& a, const Eigen::VectorXd& pa, const PathSignature& b, const Eigen::VectorXd& pb) const
    {
        if (_config.lift.kind == LiftKind::Hausdorff) {
            // max over A of dist(., B) and over B of dist(., A)
            double h = 0.0;
            for (VertexId x : a.vertex_set)
                h = std::max(h, pb(x));
            for (VertexId y : b.vertex_set)
                h = std::max(h, pa(y));
            return h;
        }
        return edit_sequences(_metric.distances, std::span<const VertexId>(a.sequence), std::span<const VertexId>(b.sequence), _indel);
    }

    Eigen::VectorXd Campaign::landmark_distances(const PathSignature& path, const Eigen::VectorXd& profile) const
    {
        Eigen::VectorXd d(static_cast<Eigen::Index>(_landmarks.size()));
        for (std::size_t i = 0; i < _landmarks.size(); ++i)
            d(static_cast<Eigen::Index>(i)) = _path_distance(path, profile, _landmarks[i].signature, _landmarks[i].profile);
        return d;
    }

    CellKey Campaign::cell_of(const PathSignature& path) const { return cell_key(landmark_distances(path, profile_of(path)), _arity); }

    Elite Campaign::_make_elite(InputVec input, Trace trace, int bandwidth)
    {
        Elite e;
        e.id = _next_id++;
        e.input = std::move(input);
        e.trace = std::move(trace);
        e.signature = PathSignature::from_trace(e.trace);
        e.profile = profile_of(e.signature);
        e.objective = path_objective(e.trace, _potentials);
        e.cell = cell_key(landmark_distances(e.signature, e.profile), _arity);
        e.bandwidth = bandwidth;
        return e;
    }

    std::vector<double> Campaign::go_distribution()
    {
        if (_go_cache)
            return *_go_cache;
        const Eigen::Index k = static_cast<Eigen::Index>(_archive.size());
        if (k == 0)
            throw StateError("go_select on an empty archive");

        std::vector<const Elite*> elites;
        std::vector<double> objectives;
        for (const auto& [key, e] : _archive) {
            elites.push_back(&e);
            objectives.push_back(e.objective);
        }

        Eigen::VectorXd weights = Eigen::VectorXd::Ones(k);
        if (_config.alpha > 0.0 && k > 1) {
            Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = i + 1; j < k; ++j)
                    d(i, j) = d(j, i) = _path_distance(elites[i]->signature, elites[i]->profile, elites[j]->signature, elites[j]->profile);
            const double t = _config.scale > 0.0 ? _config.scale : default_scale(d);
            weights = magnitude_weighting(d, t).weights;
        }
        _go_cache = go_probabilities(weights, objectives, _config.alpha);
        return *_go_cache;
    }

    const Elite& Campaign::go_select()
    {
        const std::vector<double> p = go_distribution();
        auto it = _archive.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(sample_index(p, _rng)));
        return it->second;
    }

    const Eigen::MatrixXd& Campaign::_species_similarity()
    {
        if (_species_z)
            return *_species_z;
        const Eigen::Index s = static_cast<Eigen::Index>(_species.size());
        if (_config.simtropic_identity) {
            _species_z = Eigen::MatrixXd::Identity(s, s);
            return *_species_z;
        }
        std::vector<const Species*> reps;
        for (const auto& [key, sp] : _species)
            reps.push_back(&sp);
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(s, s);
        for (Eigen::Index i = 0; i < s; ++i)
            for (Eigen::Index j = i + 1; j < s; ++j)
                d(i, j) = d(j, i) = _path_distance(reps[i]->signature, reps[i]->profile, reps[j]->signature, reps[j]->profile);
        const double t = _config.scale > 0.0 ? _config.scale : default_scale(d);
        _species_z = similarity_matrix(d, t);
        return *_species_z;
    }

    int Campaign::power_schedule(const Elite& elite)
    {
        const int bound = _config.power_bound;
        if (_config.schedule == PowerSchedule::Default) {
            std::uniform_int_distribution<int> power(1, bound);
            return power(_rng);
        }
        if (elite.species.empty())
            return bound;

        std::vector<CellKey> species;
        species.reserve(_species.size());
        for (const auto& [key, sp] : _species)
            species.push_back(key);

        auto energy = [&](const Elite& e) {
            if (_config.schedule == PowerSchedule::Entropic)
                return entropic_energy(e.species, species);
            return simtropic_energy(e.species, species, _species_similarity());
        };
        double max_energy = 0.0;
        for (const auto& [key, e] : _archive)
            if (!e.species.empty())
                max_energy = std::max(max_energy, energy(e));
        return power_from_energy(energy(elite), max_energy, bound);
    }

    void Campaign::_record_evaluation(const Trace& trace)
    {
        const int n = _program->cfg.vertex_count();
        accumulate_edge_counts(_counts, trace);
        for (std::size_t i = 1; i < trace.vertices.size(); ++i) {
            char& c = _covered[static_cast<std::size_t>(trace.vertices[i - 1]) * n + trace.vertices[i]];
            if (!c) {
                c = 1;
                ++_covered_count;
            }
        }
        ++_evaluations;
        _coverage_curve.push_back(_covered_count);
    }

    int Campaign::_assimilate(std::vector<Elite> children)
    {
        int new_cells = 0;
        for (auto& child : children) {
            _record_evaluation(child.trace);
            auto it = _archive.find(child.cell);
            if (it == _archive.end()) {
                _archive.emplace(child.cell, std::move(child));
                ++new_cells;
                _go_cache.reset();
            }
            else if (child.objective > it->second.objective) {
                it->second = std::move(child);
                _go_cache.reset();
            }
        }
        return new_cells;
    }

    int Campaign::assimilate(const std::vector<std::pair<InputVec, Trace>>& offspring, int parent_bandwidth)
    {
        std::vector<Elite> children;
        for (const auto& [input, trace] : offspring)
            children.push_back(_make_elite(input, trace, parent_bandwidth));
        return _assimilate(std::move(children));
    }

    bool Campaign::step()
    {
        if (_evaluations >= _config.budget)
            return false;

        const CellKey parent_cell = go_select().cell;
        Elite& parent = _archive.at(parent_cell);
        const int power = power_schedule(parent);
        std::vector<InputVec> mutants = mutate_batch(parent.input, parent.bandwidth, power, _program->alphabet_size, _rng);

        if (_config.pareto_filter) {
            std::vector<InputVec> elite_inputs;
            for (const auto& [key, e] : _archive)
                elite_inputs.push_back(e.input);
            std::vector<InputVec> kept;
            for (std::size_t i : pareto_filter(mutants, elite_inputs))
                kept.push_back(std::move(mutants[i]));
            mutants = std::move(kept);
        }
        const long remaining = _config.budget - _evaluations;
        if (static_cast<long>(mutants.size()) > remaining)
            mutants.resize(static_cast<std::size_t>(remaining));

        std::vector<Elite> children;
        children.reserve(mutants.size());
        for (auto& m : mutants) {
            Trace t = execute(*_program, m);
            children.push_back(_make_elite(std::move(m), std::move(t), parent.bandwidth));
        }

        int escapes = 0;
        for (const auto& child : children) {
            if (child.cell != parent.cell)
                ++escapes;
            ++parent.species[child.cell];
            if (!_species.contains(child.cell)) {
                _species.emplace(child.cell, Species{child.signature, child.profile});
                _species_z.reset();
            }
        }

        BatchRecord record;
        record.batch = static_cast<long>(_batches.size());
        record.parent_cell = parent_cell;
        record.power = power;
        record.bandwidth = parent.bandwidth;
        const int batch_size = static_cast<int>(children.size());
        const int next = _config.bandwidth_adapt
            ? update_bandwidth(parent.bandwidth, escapes, batch_size, _max_bandwidth, _config.escape_low, _config.escape_high)
            : 1;
        parent.bandwidth = next;
        parent.last_batch_size = batch_size;
        parent.last_escapes = escapes;
        for (auto& child : children)
            child.bandwidth = next;

        record.next_bandwidth = next;
        record.executed = batch_size;
        record.escapes = escapes;
        record.new_cells = _assimilate(std::move(children));
        record.archive_size = static_cast<int>(_archive.size());
        record.covered_edges = _covered_count;
        record.evaluations = _evaluations;
        _batches.push_back(std::move(record));

        if (_evaluations >= _next_refresh) {
            refresh_geometry();
            _next_refresh = (_evaluations / _config.refresh_every + 1) * _config.refresh_every;
        }
        return true;
    }

    void Campaign::refresh_geometry()
    {
        if (!_compute_geometry())
            return;
        std::map<CellKey, Elite> rekeyed;
        for (auto& [key, e] : _archive) {
            e.profile = profile_of(e.signature);
            e.objective = path_objective(e.trace, _potentials);
            e.cell = cell_key(landmark_distances(e.signature, e.profile), _arity);
            auto it = rekeyed.find(e.cell);
            if (it == rekeyed.end())
                rekeyed.emplace(e.cell, std::move(e));
            else if (e.objective > it->second.objective || (e.objective == it->second.objective && e.id < it->second.id))
                it->second = std::move(e);
        }
        _archive = std::move(rekeyed);
        _go_cache.reset();
    }

    CampaignResult Campaign::result() const
    {
        CampaignResult r;
        r.config = _config;
        r.coverage_curve = _coverage_curve;
        r.initial_coverage = _initial_coverage;
        r.coverable_edges = _program->cfg.coverable_edge_count();
        r.total_edges = _program->cfg.edge_count();
        r.total_evaluations = _evaluations;
        for (const auto& [key, e] : _archive)
            r.archive.push_back({key, e.input, e.objective, e.bandwidth});
        r.batches = _batches;
        return r;
    }

    CampaignResult Campaign::run()
    {
        while (step()) {
        }
        return result();
    }

    CampaignResult run_campaign(const CampaignConfig& config, const Program& program, const Corpus& corpus)
    {
        Campaign campaign(config, program, corpus);
        return campaign.run();
    }

} // namespace geofuzz
