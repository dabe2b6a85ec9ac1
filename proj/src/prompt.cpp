#include "thematic/prompt.hpp"

#include <array>
#include <cctype>

namespace thematic {

namespace {

constexpr std::string_view kSeed = "{seed}";
constexpr std::string_view kTextChunk = "{text_chunk}";
constexpr std::string_view kText = "{text}";

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

// Length of an identifier token `{name}` at position i, or 0.
std::size_t identifier_token(std::string_view s, std::size_t i) {
  if (s[i] != '{' || i + 2 >= s.size() || !is_ident_start(s[i + 1])) return 0;
  std::size_t j = i + 2;
  while (j < s.size() && is_ident(s[j])) ++j;
  if (j >= s.size() || s[j] != '}') return 0;
  return j + 1 - i;
}

constexpr std::string_view kDefaultBody =
    R"(You are an experienced qualitative researcher performing reflexive thematic
analysis of an interview transcript. Run ID: {seed}

Read the transcript below and identify the major emotional themes and the
recurring emotional patterns expressed by the participants.

Respond with a single JSON object and nothing else, using exactly this shape:
{
  "majorEmotionalThemes": [
    {"theme_name": "short label", "description": "one or two sentences",
     "supporting_quotes": ["verbatim quote", "..."]}
  ],
  "emotionalPatterns": [
    {"theme_name": "short label", "description": "one or two sentences",
     "supporting_quotes": ["verbatim quote", "..."]}
  ]
}

Quotes must be copied verbatim from the transcript.

Transcript:
{text_chunk}
)";

}  // namespace

PromptTemplate validate_template(std::string body) {
  PromptTemplate t;
  bool saw_chunk = false;
  bool saw_text = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const std::size_t len = identifier_token(body, i);
    if (len == 0) continue;
    const std::string_view token(body.data() + i, len);
    if (token == kSeed) {
      t.has_seed_var = true;
    } else if (token == kTextChunk) {
      saw_chunk = true;
    } else if (token == kText) {
      saw_text = true;
    } else {
      t.warnings.push_back("unknown placeholder " + std::string(token) + " left verbatim");
    }
    i += len - 1;
  }
  if (!saw_chunk && !saw_text) throw MissingTextPlaceholder();
  t.text_var = saw_chunk ? TextVar::text_chunk : TextVar::text;
  t.body = std::move(body);
  return t;
}

std::string render_prompt(const PromptTemplate& tmpl, Seed seed, std::string_view chunk_text) {
  const std::string seed_text = std::to_string(seed);
  const std::string_view body = tmpl.body;
  std::string out;
  out.reserve(body.size() + chunk_text.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    const std::size_t len = identifier_token(body, i);
    if (len != 0) {
      const std::string_view token = body.substr(i, len);
      if (token == kSeed) {
        out += seed_text;
        i += len - 1;
        continue;
      }
      if (token == kTextChunk || token == kText) {
        out += chunk_text;
        i += len - 1;
        continue;
      }
    }
    out.push_back(body[i]);
  }
  return out;
}

PromptTemplate default_prompt() { return validate_template(std::string(kDefaultBody)); }

}  // namespace thematic
