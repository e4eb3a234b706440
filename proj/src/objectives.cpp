#include <geofuzz/objectives.hpp>

#include <geofuzz/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace geofuzz {

    namespace {
        constexpr std::array<ObjectiveKind, 7> all_kinds = {ObjectiveKind::HitProbFromEntry, ObjectiveKind::ExpHitProbFromEntry, ObjectiveKind::HopFromEntry,
            ObjectiveKind::ExpHopFromEntry, ObjectiveKind::DrawingDepth, ObjectiveKind::ExpDrawingDepth, ObjectiveKind::Constant};
    }

    const char* to_string(ObjectiveKind kind)
    {
        switch (kind) {
        case ObjectiveKind::HitProbFromEntry:
            return "hitprob";
        case ObjectiveKind::ExpHitProbFromEntry:
            return "exp-hitprob";
        case ObjectiveKind::HopFromEntry:
            return "hop";
        case ObjectiveKind::ExpHopFromEntry:
            return "exp-hop";
        case ObjectiveKind::DrawingDepth:
            return "depth";
        case ObjectiveKind::ExpDrawingDepth:
            return "exp-depth";
        case ObjectiveKind::Constant:
            return "constant";
        }
        return "?";
    }

    ObjectiveKind objective_from_string(const std::string& name)
    {
        for (auto kind : all_kinds)
            if (name == to_string(kind) || (name.size() == 1 && name[0] == objective_letter(kind)))
                return kind;
        throw ParameterError("unknown objective '" + name + "'");
    }

    char objective_letter(ObjectiveKind kind) { return static_cast<char>('a' + static_cast<int>(kind)); }

    bool needs_vertex_metric(ObjectiveKind kind) { return kind == ObjectiveKind::HitProbFromEntry || kind == ObjectiveKind::ExpHitProbFromEntry; }

    std::vector<int> drawing_depth_layers(const Cfg& cfg)
    {
        const int n = cfg.vertex_count();
        // 0 = unvisited, 1 = on stack, 2 = done
        std::vector<int> state(static_cast<std::size_t>(n), 0);
        std::vector<std::vector<VertexId>> forward(static_cast<std::size_t>(n));
        std::vector<VertexId> postorder;
        std::function<void(VertexId)> dfs = [&](VertexId v) {
            state[v] = 1;
            for (VertexId w : cfg.successors[v]) {
                if (v == cfg.exit && w == cfg.entry)
                    continue;
                if (state[w] == 1)
                    continue; // back edge
                forward[v].push_back(w);
                if (state[w] == 0)
                    dfs(w);
            }
            state[v] = 2;
            postorder.push_back(v);
        };
        dfs(cfg.entry);

        std::vector<int> layer(static_cast<std::size_t>(n), 0);
        for (auto it = postorder.rbegin(); it != postorder.rend(); ++it)
            for (VertexId w : forward[*it])
                layer[w] = std::max(layer[w], layer[*it] + 1);
        return layer;
    }

    Eigen::VectorXd vertex_potential(ObjectiveKind kind, const Cfg& cfg, const MetricMatrix<double>* metric)
    {
        const int n = cfg.vertex_count();
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
        auto from_ints = [&](const std::vector<int>& v) {
            for (int i = 0; i < n; ++i)
                psi(i) = v[i];
        };
        switch (kind) {
        case ObjectiveKind::HitProbFromEntry:
        case ObjectiveKind::ExpHitProbFromEntry:
            if (metric == nullptr || metric->size() != n)
                throw StateError("vertex_potential: hitting-probability objective needs a current vertex metric");
            psi = metric->distances.row(cfg.entry).transpose();
            break;
        case ObjectiveKind::HopFromEntry:
        case ObjectiveKind::ExpHopFromEntry:
            from_ints(entry_hop_distances(cfg));
            break;
        case ObjectiveKind::DrawingDepth:
        case ObjectiveKind::ExpDrawingDepth:
            from_ints(drawing_depth_layers(cfg));
            break;
        case ObjectiveKind::Constant:
            break;
        }
        if (kind == ObjectiveKind::ExpHitProbFromEntry || kind == ObjectiveKind::ExpHopFromEntry || kind == ObjectiveKind::ExpDrawingDepth)
            psi = psi.array().exp() - 1.0;
        return psi;
    }

    double path_objective(std::span<const VertexId> vertices, const Eigen::VectorXd& potentials)
    {
        double best = 0.0;
        for (VertexId v : vertices)
            best = std::max(best, potentials(v));
        return best;
    }

    double path_objective(const Trace& trace, const Eigen::VectorXd& potentials) { return path_objective(std::span<const VertexId>(trace.vertices), potentials); }

} // namespace geofuzz
