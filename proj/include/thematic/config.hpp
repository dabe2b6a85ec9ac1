#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "thematic/mock_provider.hpp"
#include "thematic/orchestrator.hpp"

namespace thematic {

MockScenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const MockScenario& scenario);
MockScenario load_scenario(const std::filesystem::path& path);

/// Overlays the fields present in `doc` onto `base`. Recognized keys:
/// provider, model, endpoint, api_key, timeout_ms, seeds, temperature,
/// prompt, mode, sim_threshold, consensus_threshold, max_chunk_chars,
/// overlap_fraction, max_output_tokens and scenario (inline object or path).
/// Unknown keys are rejected.
AnalysisConfig config_from_json(const nlohmann::json& doc, AnalysisConfig base = {});
AnalysisConfig load_config(const std::filesystem::path& path, AnalysisConfig base = {});

// Fills an empty api_key from the provider's environment variable.
void apply_env_api_key(ProviderConfig& provider);

// "42,123,456" -> {42, 123, 456}
std::vector<Seed> parse_seed_list(const std::string& text);

std::string read_file(const std::filesystem::path& path);

}  // namespace thematic
