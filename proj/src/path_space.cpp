#include <geofuzz/path_space.hpp>

namespace geofuzz {

    const char* to_string(LiftKind kind) { return kind == LiftKind::Hausdorff ? "hausdorff" : "edit"; }

    LiftKind lift_kind_from_string(const std::string& name)
    {
        if (name == "hausdorff")
            return LiftKind::Hausdorff;
        if (name == "edit")
            return LiftKind::Edit;
        throw ParameterError("unknown path lift '" + name + "'");
    }

    std::vector<VertexId> compress_repeats(std::span<const VertexId> seq, int max_repeats)
    {
        if (max_repeats < 1)
            throw ParameterError("compress_repeats: max_repeats must be at least 1");
        const std::size_t n = seq.size();
        const std::size_t keep = static_cast<std::size_t>(max_repeats);
        std::vector<VertexId> out;
        out.reserve(n);

        auto same_block = [&](std::size_t x, std::size_t y, std::size_t len) {
            return std::equal(seq.begin() + static_cast<std::ptrdiff_t>(x), seq.begin() + static_cast<std::ptrdiff_t>(x + len),
                seq.begin() + static_cast<std::ptrdiff_t>(y));
        };

        std::size_t i = 0;
        while (i < n) {
            bool compressed = false;
            for (std::size_t p = 1; i + (keep + 1) * p <= n; ++p) {
                if (seq[i] != seq[i + p] || !same_block(i, i + p, p))
                    continue;
                std::size_t repeats = 2;
                while (i + (repeats + 1) * p <= n && same_block(i, i + repeats * p, p))
                    ++repeats;
                if (repeats <= keep)
                    continue;
                for (std::size_t r = 0; r < keep; ++r)
                    out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(i), seq.begin() + static_cast<std::ptrdiff_t>(i + p));
                i += repeats * p;
                compressed = true;
                break;
            }
            if (!compressed)
                out.push_back(seq[i++]);
        }
        return out;
    }

} // namespace geofuzz
