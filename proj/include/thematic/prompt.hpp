#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "thematic/error.hpp"

namespace thematic {

using Seed = std::uint64_t;

enum class TextVar { none, text_chunk, text };

struct PromptTemplate {
  std::string body;
  bool has_seed_var = false;
  TextVar text_var = TextVar::none;
  std::vector<std::string> warnings;  // unknown {identifier} tokens

  bool operator==(const PromptTemplate&) const = default;
};

class MissingTextPlaceholder : public Error {
 public:
  MissingTextPlaceholder()
      : Error("prompt template needs a {text_chunk} or {text} placeholder") {}
};

/// Accepts a template iff it contains {text_chunk} or {text}. Unknown
/// identifier-like tokens such as {speaker} are reported as warnings and left
/// untouched when rendering.
PromptTemplate validate_template(std::string body);

/// Replaces {seed} with the decimal seed and {text_chunk}/{text} with the
/// chunk in one left-to-right pass, so substituted text is never rescanned.
std::string render_prompt(const PromptTemplate& tmpl, Seed seed, std::string_view chunk_text);

PromptTemplate default_prompt();

}  // namespace thematic
