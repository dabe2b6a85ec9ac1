#include "thematic/json_extract.hpp"

#include <set>

namespace thematic {

using nlohmann::json;

std::string_view to_string(ExtractionStage stage) {
  switch (stage) {
    case ExtractionStage::direct: return "direct";
    case ExtractionStage::fence_stripped: return "fence_stripped";
    case ExtractionStage::salvaged: return "salvaged";
  }
  return "unknown";
}

std::string_view to_string(SchemaMode mode) {
  return mode == SchemaMode::default_schema ? "default" : "custom";
}

SchemaMode schema_mode_from_string(std::string_view name) {
  if (name == "default" || name == "default_schema") return SchemaMode::default_schema;
  if (name == "custom") return SchemaMode::custom;
  throw InvalidArgument("unknown schema mode: " + std::string(name));
}

namespace {

// ECMAScript \s restricted to the C locale, as std::regex applies it to char.
bool is_regex_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

// Parses text as JSON, noting duplicate keys. Arrays are wrapped into an
// object; scalars count as failure.
std::optional<json> parse_object(std::string_view text, std::vector<std::string>& diagnostics) {
  std::vector<std::set<std::string>> scopes;
  std::vector<std::string> duplicates;
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start: scopes.emplace_back(); break;
      case json::parse_event_t::object_end:
        if (!scopes.empty()) scopes.pop_back();
        break;
      case json::parse_event_t::key:
        if (!scopes.empty() && !scopes.back().insert(parsed.get<std::string>()).second) {
          duplicates.push_back(parsed.get<std::string>());
        }
        break;
      default: break;
    }
    return true;
  };
  json value = json::parse(text.begin(), text.end(), cb, /*allow_exceptions=*/false);
  if (value.is_discarded()) return std::nullopt;
  for (const auto& key : duplicates) {
    diagnostics.push_back("duplicate key \"" + key + "\" resolved to last value");
  }
  if (value.is_array()) {
    diagnostics.push_back("top-level array wrapped as {\"items\": [...]}");
    return json{{"items", std::move(value)}};
  }
  if (!value.is_object()) return std::nullopt;
  return value;
}

}  // namespace

std::string strip_fences(std::string_view raw) {
  std::string_view s = raw;

  // ^```(?:json)?\s*\n?
  if (s.substr(0, 3) == "```") {
    std::size_t pos = 3;
    if (s.substr(pos, 4) == "json") pos += 4;
    while (pos < s.size() && is_regex_space(s[pos])) ++pos;
    s.remove_prefix(pos);
  }

  // \n?```\s*$ : the only candidate is a ``` followed by nothing but spaces.
  std::size_t tail = s.size();
  while (tail > 0 && is_regex_space(s[tail - 1])) --tail;
  if (tail >= 3 && s.substr(tail - 3, 3) == "```") {
    std::size_t cut = tail - 3;
    if (cut > 0 && s[cut - 1] == '\n') --cut;
    s = s.substr(0, cut);
  }
  return std::string(s);
}

std::optional<json> salvage_json(std::string_view raw) {
  const std::size_t first = raw.find('{');
  const std::size_t last = raw.rfind('}');
  if (first == std::string_view::npos || last == std::string_view::npos || last < first) {
    return std::nullopt;
  }
  std::vector<std::string> ignored;
  auto value = parse_object(raw.substr(first, last - first + 1), ignored);
  if (!value || !value->is_object()) return std::nullopt;
  return value;
}

ExtractionOutcome extract_json(std::string_view raw, SchemaMode mode) {
  ExtractionOutcome outcome;
  std::optional<json> value = parse_object(raw, outcome.diagnostics);
  if (value) {
    outcome.stage = ExtractionStage::direct;
  } else {
    std::size_t begin = 0;
    while (begin < raw.size() && is_regex_space(raw[begin])) ++begin;
    value = parse_object(strip_fences(raw.substr(begin)), outcome.diagnostics);
    if (value) {
      outcome.stage = ExtractionStage::fence_stripped;
    } else {
      const std::size_t first = raw.find('{');
      const std::size_t last = raw.rfind('}');
      if (first != std::string_view::npos && last != std::string_view::npos && last > first) {
        value = parse_object(raw.substr(first, last - first + 1), outcome.diagnostics);
      }
      if (!value) throw UnparseableResponse(std::string(raw));
      outcome.stage = ExtractionStage::salvaged;
      outcome.diagnostics.push_back("recovered JSON between first '{' and last '}'");
    }
  }

  if (mode == SchemaMode::default_schema) {
    for (std::string_view field : {kMajorThemesField, kPatternsField}) {
      const auto it = value->find(field);
      if (it == value->end() || !it->is_array()) {
        throw SchemaViolation(std::string(field), std::string(raw));
      }
    }
  }
  outcome.value = std::move(*value);
  return outcome;
}

}  // namespace thematic
