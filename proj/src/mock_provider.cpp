#include "thematic/mock_provider.hpp"

#include <array>
#include <json.hpp>
#include <random>
#include <sstream>

namespace thematic {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

constexpr std::array<std::string_view, 12> kFillers = {
    "notably", "really",  "overall", "broadly", "somewhat", "clearly",
    "largely", "indeed",  "perhaps", "mostly",  "arguably", "simply"};

std::mt19937_64 rng_for(const MockScenario& scenario, Seed seed) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(scenario.salt + 0x51ED)));
}

std::string paraphrase(const std::string& text, double noise, std::mt19937_64& rng) {
  if (noise <= 0.0) return text;
  std::istringstream words(text);
  std::string word;
  std::string out;
  while (words >> word) {
    if (!out.empty()) out.push_back(' ');
    if (unit(rng) < noise) {
      out += kFillers[rng() % kFillers.size()];
    } else {
      out += word;
    }
  }
  return out;
}

}  // namespace

std::vector<bool> mock_inclusion(const MockScenario& scenario, Seed seed) {
  auto rng = rng_for(scenario, seed);
  std::vector<bool> included;
  included.reserve(scenario.themes.size());
  for (const MockTheme& theme : scenario.themes) included.push_back(unit(rng) < theme.inclusion);
  return included;
}

std::string mock_payload(const MockScenario& scenario, Seed seed) {
  auto rng = rng_for(scenario, seed);
  std::vector<bool> included;
  for (const MockTheme& theme : scenario.themes) included.push_back(unit(rng) < theme.inclusion);

  json doc = json::object();
  if (scenario.schema == SchemaShape::default_format) {
    doc["majorEmotionalThemes"] = json::array();
    doc["emotionalPatterns"] = json::array();
  } else {
    doc[scenario.custom_fields.array] = json::array();
  }

  for (std::size_t i = 0; i < scenario.themes.size(); ++i) {
    if (!included[i]) continue;
    const MockTheme& theme = scenario.themes[i];
    const std::string description = paraphrase(theme.description, scenario.noise, rng);
    if (scenario.schema == SchemaShape::default_format) {
      const char* field = theme.category == MockTheme::Category::theme ? "majorEmotionalThemes"
                                                                       : "emotionalPatterns";
      doc[field].push_back({{"theme_name", theme.name},
                            {"description", description},
                            {"supporting_quotes", theme.quotes}});
    } else {
      const CustomFieldNames& f = scenario.custom_fields;
      json item = {{f.name, theme.name}, {f.quotes, theme.quotes}};
      if (!f.description.empty()) item[f.description] = description;
      doc[f.array].push_back(std::move(item));
    }
  }
  return doc.dump(2);
}

MockOutcome mock_generate(const MockScenario& scenario, Seed seed, int attempt) {
  if (auto it = scenario.failures.find(seed); it != scenario.failures.end()) {
    const MockFailure& failure = it->second;
    if (failure.failing_attempts == 0 || attempt <= failure.failing_attempts) {
      return {std::nullopt, failure.kind};
    }
  }
  const std::string payload = mock_payload(scenario, seed);
  switch (scenario.wrapper) {
    case WrapperStyle::plain: return {payload, std::nullopt};
    case WrapperStyle::fenced: return {"```json\n" + payload + "\n```", std::nullopt};
    case WrapperStyle::fenced_prose:
      return {"Here is the thematic analysis you asked for.\n\n```json\n" + payload +
                  "\n```\n\nLet me know if you would like me to expand on any theme.",
              std::nullopt};
  }
  return {payload, std::nullopt};
}

}  // namespace thematic
