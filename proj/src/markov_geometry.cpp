#include <geofuzz/markov_geometry.hpp>

#include <queue>

namespace geofuzz {

    std::vector<int> entry_hop_distances(const Cfg& cfg)
    {
        std::vector<int> hops(static_cast<std::size_t>(cfg.vertex_count()), -1);
        std::queue<VertexId> frontier;
        hops[cfg.entry] = 0;
        frontier.push(cfg.entry);
        while (!frontier.empty()) {
            const VertexId v = frontier.front();
            frontier.pop();
            for (VertexId w : cfg.successors[v]) {
                if (hops[w] < 0) {
                    hops[w] = hops[v] + 1;
                    frontier.push(w);
                }
            }
        }
        for (int v = 0; v < cfg.vertex_count(); ++v)
            if (hops[v] < 0)
                throw StructuralError("entry_hop_distances: vertex " + std::to_string(v) + " unreachable from entry");
        return hops;
    }

} // namespace geofuzz
