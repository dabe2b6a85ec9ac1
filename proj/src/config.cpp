#include "thematic/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace thematic {

using nlohmann::json;

namespace {

std::string_view to_string(WrapperStyle w) {
  switch (w) {
    case WrapperStyle::plain: return "plain";
    case WrapperStyle::fenced: return "fenced";
    case WrapperStyle::fenced_prose: return "fenced_prose";
  }
  return "plain";
}

WrapperStyle wrapper_from_string(const std::string& s) {
  for (WrapperStyle w : {WrapperStyle::plain, WrapperStyle::fenced, WrapperStyle::fenced_prose}) {
    if (to_string(w) == s) return w;
  }
  throw InvalidArgument("unknown wrapper style: " + s);
}

constexpr std::pair<MockFailureKind, std::string_view> kFailureNames[] = {
    {MockFailureKind::transport, "transport"},
    {MockFailureKind::timeout, "timeout"},
    {MockFailureKind::server_error, "server_error"},
    {MockFailureKind::rate_limit, "rate_limit"},
    {MockFailureKind::auth, "auth"},
};

MockFailureKind failure_from_string(const std::string& s) {
  for (auto [kind, name] : kFailureNames) {
    if (name == s) return kind;
  }
  throw InvalidArgument("unknown failure kind: " + s);
}

std::string_view failure_name(MockFailureKind k) {
  for (auto [kind, name] : kFailureNames) {
    if (kind == k) return name;
  }
  return "server_error";
}

void reject_unknown(const json& doc, std::initializer_list<std::string_view> known, const char* where) {
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) throw InvalidArgument(std::string("unknown key in ") + where + ": " + key);
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

MockScenario scenario_from_json(const json& doc) {
  try {
    reject_unknown(doc, {"themes", "noise", "wrapper", "schema", "custom_fields", "salt", "failures"}, "scenario");
    MockScenario s;
    for (const json& t : doc.at("themes")) {
      MockTheme theme;
      theme.name = t.at("name").get<std::string>();
      theme.description = t.value("description", std::string{});
      theme.quotes = t.value("quotes", std::vector<std::string>{});
      theme.inclusion = t.value("inclusion", 1.0);
      if (!(theme.inclusion >= 0.0 && theme.inclusion <= 1.0)) {
        throw InvalidArgument("inclusion must lie in [0, 1] for theme " + theme.name);
      }
      const std::string category = t.value("category", std::string("theme"));
      if (category == "pattern") {
        theme.category = MockTheme::Category::pattern;
      } else if (category != "theme") {
        throw InvalidArgument("unknown theme category: " + category);
      }
      s.themes.push_back(std::move(theme));
    }
    s.noise = doc.value("noise", 0.0);
    if (!(s.noise >= 0.0 && s.noise <= 1.0)) throw InvalidArgument("noise must lie in [0, 1]");
    s.wrapper = wrapper_from_string(doc.value("wrapper", std::string("plain")));
    const std::string schema = doc.value("schema", std::string("default"));
    if (schema == "custom") {
      s.schema = SchemaShape::custom;
    } else if (schema != "default") {
      throw InvalidArgument("unknown scenario schema: " + schema);
    }
    if (doc.contains("custom_fields")) {
      const json& f = doc.at("custom_fields");
      s.custom_fields.array = f.value("array", s.custom_fields.array);
      s.custom_fields.name = f.value("name", s.custom_fields.name);
      s.custom_fields.description = f.value("description", s.custom_fields.description);
      s.custom_fields.quotes = f.value("quotes", s.custom_fields.quotes);
    }
    s.salt = doc.value("salt", std::uint64_t{0});
    if (doc.contains("failures")) {
      for (const auto& [seed, f] : doc.at("failures").items()) {
        MockFailure failure;
        failure.kind = failure_from_string(f.value("kind", std::string("server_error")));
        failure.failing_attempts = f.value("failing_attempts", 0);
        s.failures[std::stoull(seed)] = failure;
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed scenario: ") + e.what());
  }
}

json scenario_to_json(const MockScenario& s) {
  json themes = json::array();
  for (const MockTheme& t : s.themes) {
    themes.push_back({{"name", t.name},
                      {"description", t.description},
                      {"quotes", t.quotes},
                      {"inclusion", t.inclusion},
                      {"category", t.category == MockTheme::Category::pattern ? "pattern" : "theme"}});
  }
  json failures = json::object();
  for (const auto& [seed, f] : s.failures) {
    failures[std::to_string(seed)] = {{"kind", failure_name(f.kind)}, {"failing_attempts", f.failing_attempts}};
  }
  return {{"themes", themes},
          {"noise", s.noise},
          {"wrapper", to_string(s.wrapper)},
          {"schema", s.schema == SchemaShape::custom ? "custom" : "default"},
          {"custom_fields",
           {{"array", s.custom_fields.array},
            {"name", s.custom_fields.name},
            {"description", s.custom_fields.description},
            {"quotes", s.custom_fields.quotes}}},
          {"salt", s.salt},
          {"failures", failures}};
}

MockScenario load_scenario(const std::filesystem::path& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw InvalidArgument("scenario file is not valid JSON: " + path.string());
  return scenario_from_json(doc);
}

std::vector<Seed> parse_seed_list(const std::string& text) {
  std::vector<Seed> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) throw InvalidArgument("empty entry in seed list");
    const auto last = item.find_last_not_of(" \t");
    const std::string token = item.substr(first, last - first + 1);
    if (token.find_first_not_of("0123456789") != std::string::npos) {
      throw InvalidArgument("seed is not a non-negative integer: " + token);
    }
    seeds.push_back(std::stoull(token));
  }
  if (seeds.empty()) throw InvalidArgument("seed list is empty");
  return seeds;
}

AnalysisConfig config_from_json(const json& doc, AnalysisConfig base) {
  if (!doc.is_object()) throw InvalidArgument("configuration must be a JSON object");
  reject_unknown(doc,
                 {"provider", "model", "endpoint", "api_key", "timeout_ms", "seeds", "temperature", "prompt", "mode",
                  "sim_threshold", "consensus_threshold", "max_chunk_chars", "overlap_fraction",
                  "max_output_tokens", "scenario"},
                 "configuration");
  try {
    AnalysisConfig c = std::move(base);
    if (doc.contains("provider")) c.provider.kind = provider_kind_from_string(doc["provider"].get<std::string>());
    if (doc.contains("model")) c.provider.model = doc["model"].get<std::string>();
    if (doc.contains("endpoint")) c.provider.endpoint = doc["endpoint"].get<std::string>();
    if (doc.contains("api_key")) c.provider.api_key = doc["api_key"].get<std::string>();
    if (doc.contains("timeout_ms")) c.provider.timeout = std::chrono::milliseconds(doc["timeout_ms"].get<long>());
    if (doc.contains("seeds")) c.seeds = doc["seeds"].get<std::vector<Seed>>();
    if (doc.contains("temperature")) c.temperature = doc["temperature"].get<double>();
    if (doc.contains("prompt")) c.prompt = validate_template(doc["prompt"].get<std::string>());
    if (doc.contains("mode")) c.mode = schema_mode_from_string(doc["mode"].get<std::string>());
    if (doc.contains("sim_threshold")) c.sim_threshold = doc["sim_threshold"].get<double>();
    if (doc.contains("consensus_threshold")) c.consensus_threshold = doc["consensus_threshold"].get<double>();
    if (doc.contains("max_chunk_chars")) c.chunking.max_chunk_chars = doc["max_chunk_chars"].get<std::size_t>();
    if (doc.contains("overlap_fraction")) c.chunking.overlap_fraction = doc["overlap_fraction"].get<double>();
    if (doc.contains("max_output_tokens")) c.max_output_tokens = doc["max_output_tokens"].get<int>();
    if (doc.contains("scenario")) {
      const json& s = doc["scenario"];
      c.provider.scenario = std::make_shared<const MockScenario>(
          s.is_string() ? load_scenario(s.get<std::string>()) : scenario_from_json(s));
    }
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed configuration: ") + e.what());
  }
}

AnalysisConfig load_config(const std::filesystem::path& path, AnalysisConfig base) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw InvalidArgument("config file is not valid JSON: " + path.string());
  return config_from_json(doc, std::move(base));
}

void apply_env_api_key(ProviderConfig& provider) {
  if (!provider.api_key.empty() || provider.kind == ProviderKind::mock) return;
  const std::string var(api_key_env_var(provider.kind));
  if (const char* value = std::getenv(var.c_str()); value != nullptr) provider.api_key = value;
}

}  // namespace thematic
