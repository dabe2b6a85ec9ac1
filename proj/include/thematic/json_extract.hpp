#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "thematic/error.hpp"

namespace thematic {

enum class ExtractionStage { direct, fence_stripped, salvaged };
enum class SchemaMode { default_schema, custom };

std::string_view to_string(ExtractionStage stage);
std::string_view to_string(SchemaMode mode);
SchemaMode schema_mode_from_string(std::string_view name);

inline constexpr std::string_view kMajorThemesField = "majorEmotionalThemes";
inline constexpr std::string_view kPatternsField = "emotionalPatterns";

struct ExtractionOutcome {
  nlohmann::json value;  // always an object
  ExtractionStage stage = ExtractionStage::direct;
  std::vector<std::string> diagnostics;
};

// Both extraction errors keep the untouched provider output.
class ExtractionError : public Error {
 public:
  ExtractionError(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class UnparseableResponse : public ExtractionError {
 public:
  explicit UnparseableResponse(std::string raw)
      : ExtractionError("no JSON object could be extracted from the response", std::move(raw)) {}
};

class SchemaViolation : public ExtractionError {
 public:
  SchemaViolation(const std::string& missing_field, std::string raw)
      : ExtractionError("required field missing or not an array: " + missing_field, std::move(raw)),
        missing_field_(missing_field) {}
  const std::string& missing_field() const noexcept { return missing_field_; }

 private:
  std::string missing_field_;
};

/// Removes a leading ```/```json fence line and a trailing ``` fence,
/// equivalent to applying /^```(?:json)?\s*\n?/ then /\n?```\s*$/.
std::string strip_fences(std::string_view raw);

/// Parses the substring from the first '{' to the last '}'.
std::optional<nlohmann::json> salvage_json(std::string_view raw);

/// Direct parse, then fence stripping, then salvage. Top-level arrays are
/// wrapped as {"items": [...]}; duplicate keys keep the last value.
ExtractionOutcome extract_json(std::string_view raw, SchemaMode mode);

}  // namespace thematic
