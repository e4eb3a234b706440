#pragma once

#include <geofuzz/diversity.hpp>
#include <geofuzz/path_space.hpp>
#include <geofuzz/toylang.hpp>

#include <cstdint>
#include <vector>

namespace geofuzz {

    /// Initial inputs, their precomputed traces and the landmark subset.
    struct Corpus {
        std::vector<InputVec> inputs;
        std::vector<Trace> traces;
        std::vector<int> landmark_indices;
    };

    struct BootstrapParams {
        int candidates = 41;
        int landmarks = 15;
        double beta = 0.5;
        double epsilon = 0.5;
        PathDissimilarityConfig lift;
        LandmarkStrategy strategy = LandmarkStrategy::GreedyMagnitude;
        std::uint64_t seed = 0;
    };

    /// Executes random inputs and picks landmark paths under the hitting-probability
    /// geometry of the walk those executions induce.
    Corpus bootstrap_corpus(const Program& program, const BootstrapParams& params);

} // namespace geofuzz
