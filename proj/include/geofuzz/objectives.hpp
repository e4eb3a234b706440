#pragma once

#include <geofuzz/markov_geometry.hpp>
#include <geofuzz/toylang.hpp>

#include <span>
#include <string>
#include <vector>

namespace geofuzz {

    /// Path objectives a-g, in letter order.
    enum class ObjectiveKind { HitProbFromEntry, ExpHitProbFromEntry, HopFromEntry, ExpHopFromEntry, DrawingDepth, ExpDrawingDepth, Constant };

    const char* to_string(ObjectiveKind kind);
    ObjectiveKind objective_from_string(const std::string& name);
    char objective_letter(ObjectiveKind kind);
    bool needs_vertex_metric(ObjectiveKind kind);

    /// Longest-path layer of each vertex once back edges and exit -> entry are removed.
    std::vector<int> drawing_depth_layers(const Cfg& cfg);

    /// Per-vertex potential psi. The hitting-probability kinds read `metric`, which must then be non-null.
    Eigen::VectorXd vertex_potential(ObjectiveKind kind, const Cfg& cfg, const MetricMatrix<double>* metric);

    /// phi(trace) = max of psi over visited vertices.
    double path_objective(const Trace& trace, const Eigen::VectorXd& potentials);
    double path_objective(std::span<const VertexId> vertices, const Eigen::VectorXd& potentials);

} // namespace geofuzz
