#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

namespace thematic::testing {

enum class Wrapper { plain, fenced, fenced_tag, prose, truncated_tail, duplicate_keys, top_level_array };

inline constexpr Wrapper kWrappers[] = {Wrapper::plain,          Wrapper::fenced,         Wrapper::fenced_tag,
                                        Wrapper::prose,          Wrapper::truncated_tail, Wrapper::duplicate_keys,
                                        Wrapper::top_level_array};

inline const char* wrapper_name(Wrapper w) {
  switch (w) {
    case Wrapper::plain: return "plain";
    case Wrapper::fenced: return "fenced";
    case Wrapper::fenced_tag: return "fenced_tag";
    case Wrapper::prose: return "prose";
    case Wrapper::truncated_tail: return "truncated_tail";
    case Wrapper::duplicate_keys: return "duplicate_keys";
    case Wrapper::top_level_array: return "top_level_array";
  }
  return "?";
}

struct CorpusCase {
  Wrapper wrapper;
  std::string raw;
  nlohmann::json expected;  // what a correct extraction yields
};

namespace detail {

inline std::string pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
  return pool[rng() % pool.size()];
}

inline std::string sentence(std::mt19937_64& rng, int words) {
  static const std::vector<std::string> vocab = {
      "worry", "family",  "money",  "sleep", "hope",   "anger",  "work",    "friends", "loss",   "change",
      "home",  "routine", "future", "body",  "trust",  "school", "doctor",  "quiet",   "late",   "again",
      "café",  "naïve",   "{odd}",  "a\"q",  "back`s", "50%",    "line\nx", "tab\tx",  "emoji😀", "über"};
  std::string s;
  for (int i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += pick(rng, vocab);
  }
  return s;
}

inline nlohmann::json payload(std::mt19937_64& rng) {
  nlohmann::json themes = nlohmann::json::array();
  const int n = 1 + static_cast<int>(rng() % 6);
  for (int i = 0; i < n; ++i) {
    nlohmann::json quotes = nlohmann::json::array();
    for (int q = 0, nq = static_cast<int>(rng() % 3); q < nq; ++q) quotes.push_back(sentence(rng, 4));
    themes.push_back({{"theme_name", sentence(rng, 2)},
                      {"description", sentence(rng, 6)},
                      {"supporting_quotes", quotes}});
  }
  return {{"core_themes", themes}, {"confidence", static_cast<double>(rng() % 100) / 100.0}};
}

inline std::string dump(std::mt19937_64& rng, const nlohmann::json& v) {
  return rng() % 2 ? v.dump(2) : v.dump();
}

inline const std::vector<std::string>& leads() {
  static const std::vector<std::string> v = {
      "Here is the analysis you asked for:\n\n", "Sure! Below are the themes.\n", "Analysis complete.\n\n",
      "I identified the following themes in the transcript:\n"};
  return v;
}

inline const std::vector<std::string>& trails() {
  static const std::vector<std::string> v = {
      "\n\nLet me know if you would like me to expand on any of these themes.",
      "\n\nThese themes are grounded in the quotes above and reflect recurring patterns.",
      "\n\nNote: quotes were shortened for readability; the full context is in the transcript.",
      "\n\nI hope this helps with your qualitative analysis!"};
  return v;
}

}  // namespace detail

/// Deterministic synthetic corpus of LLM-style responses, cycling through the
/// wrapper taxonomy.
inline std::vector<CorpusCase> make_corpus(std::size_t n, std::uint64_t seed = 20240611) {
  using namespace detail;
  std::mt19937_64 rng(seed);
  std::vector<CorpusCase> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Wrapper w = kWrappers[i % std::size(kWrappers)];
    nlohmann::json value = payload(rng);
    std::string body = dump(rng, value);
    std::string raw;
    switch (w) {
      case Wrapper::plain:
        raw = (rng() % 2 ? "\n  " : "") + body + (rng() % 2 ? "\n" : "");
        break;
      case Wrapper::fenced:
        raw = "```\n" + body + "\n```";
        break;
      case Wrapper::fenced_tag:
        raw = "```json\n" + body + "\n```" + (rng() % 2 ? "\n" : "");
        break;
      case Wrapper::prose:
        raw = pick(rng, leads()) + (rng() % 2 ? "```json\n" + body + "\n```" : body) + pick(rng, trails());
        break;
      case Wrapper::truncated_tail: {
        // Output cut off by a token limit somewhere in the trailing prose.
        std::string full = "```json\n" + body + "\n```" + pick(rng, trails());
        full.resize(full.size() - 1 - rng() % 80);
        raw = full;
        break;
      }
      case Wrapper::duplicate_keys: {
        // An early draft of the field is superseded by the final one.
        std::string draft = R"({"confidence": 0.01, )" + body.substr(body.find('{') + 1);
        raw = "```json\n" + draft + "\n```";
        break;
      }
      case Wrapper::top_level_array:
        value = value["core_themes"];
        raw = (rng() % 2 ? "```json\n" : "") + dump(rng, value);
        if (raw.starts_with("```")) raw += "\n```";
        value = {{"items", value}};
        break;
    }
    out.push_back({w, std::move(raw), std::move(value)});
  }
  return out;
}

}  // namespace thematic::testing
