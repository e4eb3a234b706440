#include <geofuzz/corpus.hpp>

#include <geofuzz/error.hpp>
#include <geofuzz/markov_geometry.hpp>

namespace geofuzz {

    Corpus bootstrap_corpus(const Program& program, const BootstrapParams& params)
    {
        if (params.candidates < 1)
            throw ParameterError("bootstrap: need at least one candidate");
        if (params.landmarks < 2)
            throw ParameterError("bootstrap: need at least two landmarks");

        Corpus corpus;
        Rng rng(params.seed);
        const int n = program.cfg.vertex_count();
        Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < params.candidates; ++i) {
            corpus.inputs.push_back(random_input(program, rng));
            corpus.traces.push_back(execute(program, corpus.inputs.back()));
            accumulate_edge_counts(counts, corpus.traces.back());
        }

        const auto chain = estimate_chain(counts, program.cfg.adjacency(), params.epsilon);
        const auto metric = hitting_prob_metric(chain, params.beta);
        const PathMetric lift(metric, params.lift);

        std::vector<PathSignature> signatures;
        for (const auto& t : corpus.traces)
            signatures.push_back(PathSignature::from_trace(t));
        const int m = params.candidates;
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                d(i, j) = d(j, i) = lift(signatures[i], signatures[j]);

        if (m == 1) {
            corpus.landmark_indices = {0};
            return corpus;
        }
        corpus.landmark_indices = select_landmarks(d, params.landmarks, default_scale(d), params.strategy).indices;
        return corpus;
    }

} // namespace geofuzz
