#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thematic/prompt.hpp"

namespace thematic {

struct MockTheme {
  std::string name;
  std::string description;
  std::vector<std::string> quotes;
  double inclusion = 1.0;
  // Which default-schema array the theme is emitted into.
  enum class Category { theme, pattern } category = Category::theme;

  bool operator==(const MockTheme&) const = default;
};

enum class WrapperStyle { plain, fenced, fenced_prose };
enum class SchemaShape { default_format, custom };

enum class MockFailureKind { transport, timeout, server_error, rate_limit, auth };

struct MockFailure {
  MockFailureKind kind = MockFailureKind::server_error;
  // Number of leading attempts that fail; 0 fails every attempt.
  int failing_attempts = 0;

  bool operator==(const MockFailure&) const = default;
};

struct CustomFieldNames {
  std::string array = "core_themes";
  std::string name = "theme_name";
  std::string description = "description";
  std::string quotes = "supporting_quotes";

  bool operator==(const CustomFieldNames&) const = default;
};

/// Scripted stand-in for an LLM. Its output is a pure function of the
/// scenario and the request seed (and attempt number, for scripted failures).
struct MockScenario {
  std::vector<MockTheme> themes;
  double noise = 0.0;  // per-word paraphrase probability in [0, 1]
  WrapperStyle wrapper = WrapperStyle::plain;
  SchemaShape schema = SchemaShape::default_format;
  CustomFieldNames custom_fields;
  std::uint64_t salt = 0;  // separates otherwise identical "models"
  std::map<Seed, MockFailure> failures;

  bool operator==(const MockScenario&) const = default;
};

struct MockOutcome {
  std::optional<std::string> text;  // absent when this attempt is scripted to fail
  std::optional<MockFailureKind> failure;
};

/// Which pool themes a seed includes. Exposed so tests can compute
/// expectations without parsing text.
std::vector<bool> mock_inclusion(const MockScenario& scenario, Seed seed);

MockOutcome mock_generate(const MockScenario& scenario, Seed seed, int attempt);

// Canonical payload for a seed before wrapping (exposed for tests).
std::string mock_payload(const MockScenario& scenario, Seed seed);

}  // namespace thematic
