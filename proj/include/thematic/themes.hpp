#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "thematic/error.hpp"
#include "thematic/prompt.hpp"

namespace thematic {

struct ThemeRecord {
  std::string name;
  std::string description;  // equals name when the source had none
  std::vector<std::string> quotes;
  Seed run_id = 0;
  std::string field_path;  // e.g. "core_themes" or "analysis.themes"

  bool operator==(const ThemeRecord&) const = default;
};

struct ThemeArraySpec {
  std::string field_path;
  std::optional<std::string> name_key;
  std::optional<std::string> description_key;
  std::optional<std::string> quotes_key;
  double coverage = 0.0;  // fraction of runs where the path is an array of objects

  bool operator==(const ThemeArraySpec&) const = default;
};

struct SchemaDescriptor {
  std::vector<ThemeArraySpec> theme_arrays;

  bool operator==(const SchemaDescriptor&) const = default;
};

class NoThemeArraysFound : public Error {
 public:
  NoThemeArraysFound() : Error("no field is an array of objects in at least half of the runs") {}
};

inline constexpr std::string_view kNameKeys[] = {"theme_name", "name", "theme", "title", "label"};
inline constexpr std::string_view kQuoteKeys[] = {"supporting_quotes", "quotes", "evidence", "examples"};
inline constexpr std::string_view kDescriptionKeys[] = {"description", "summary", "detail"};

/// Finds theme arrays shared by the runs. A path (top level, or one level
/// below a top-level object, written "parent.child") qualifies when it holds
/// an array of objects in at least half of the runs.
SchemaDescriptor detect_schema(std::span<const nlohmann::json> parsed_runs);

/// One record per usable object in every qualifying array, in array order.
/// Skipped objects are reported through `diagnostics` when given.
std::vector<ThemeRecord> extract_themes(const nlohmann::json& parsed, const SchemaDescriptor& schema,
                                        Seed run_id, std::vector<std::string>* diagnostics = nullptr);

// Text handed to the embedder: "name: description", or just the name.
std::string embedding_text(const ThemeRecord& theme);

// Resolves a dotted field path; nullptr when absent.
const nlohmann::json* resolve_path(const nlohmann::json& root, const std::string& path);

}  // namespace thematic
