#pragma once

#include <geofuzz/corpus.hpp>
#include <geofuzz/fuzz_core.hpp>
#include <geofuzz/toylang.hpp>

#include <json.hpp>

#include <filesystem>

namespace geofuzz {

    using json = nlohmann::json;

    inline constexpr int program_format_version = 1;

    json program_to_json(const Program& program);
    Program program_from_json(const json& doc);

    json corpus_to_json(const Corpus& corpus);
    Corpus corpus_from_json(const json& doc);

    json config_to_json(const CampaignConfig& config);
    /// Overlays the keys present in `doc` on `base`; unknown keys are rejected.
    CampaignConfig config_from_json(const json& doc, CampaignConfig base = {});

    json result_to_json(const CampaignResult& result);

    /// Throws IoError naming the file on open or parse failure.
    json load_json(const std::filesystem::path& path);
    void save_json(const std::filesystem::path& path, const json& doc);
    void save_text(const std::filesystem::path& path, const std::string& text);

    Program load_program(const std::filesystem::path& path);
    Corpus load_corpus(const std::filesystem::path& path);

} // namespace geofuzz
