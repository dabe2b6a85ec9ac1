#include "thematic/themes.hpp"

#include <algorithm>
#include <map>

namespace thematic {

using nlohmann::json;

namespace {

bool is_object_array(const json* v) {
  return v != nullptr && v->is_array() &&
         std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_object(); });
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::optional<std::string> string_field(const json& obj, const std::optional<std::string>& key) {
  if (!key) return std::nullopt;
  const auto it = obj.find(*key);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  std::string value = trim(it->get<std::string>());
  if (value.empty()) return std::nullopt;
  return value;
}

template <std::size_t N>
std::optional<std::string> first_present(const std::vector<const json*>& objects,
                                         const std::string_view (&candidates)[N]) {
  for (std::string_view key : candidates) {
    for (const json* obj : objects) {
      if (obj->contains(key)) return std::string(key);
    }
  }
  return std::nullopt;
}

}  // namespace

const json* resolve_path(const json& root, const std::string& path) {
  const json* node = &root;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (!node->is_object()) return nullptr;
    const auto it = node->find(key);
    if (it == node->end()) return nullptr;
    node = &*it;
    if (dot == std::string::npos) return node;
    begin = dot + 1;
  }
}

SchemaDescriptor detect_schema(std::span<const json> parsed_runs) {
  if (parsed_runs.empty()) throw InvalidArgument("detect_schema needs at least one parsed run");

  // Candidate paths in sorted order so the descriptor is independent of run order.
  std::map<std::string, std::size_t> hits;
  for (const json& run : parsed_runs) {
    if (!run.is_object()) continue;
    for (auto it = run.begin(); it != run.end(); ++it) {
      if (it->is_array()) hits.try_emplace(it.key(), 0);
      if (it->is_object()) {
        for (auto inner = it->begin(); inner != it->end(); ++inner) {
          if (inner->is_array()) hits.try_emplace(it.key() + "." + inner.key(), 0);
        }
      }
    }
  }

  SchemaDescriptor schema;
  const double runs = static_cast<double>(parsed_runs.size());
  for (auto& [path, count] : hits) {
    std::vector<const json*> objects;
    for (const json& run : parsed_runs) {
      const json* node = resolve_path(run, path);
      if (!is_object_array(node)) continue;
      ++count;
      for (const json& e : *node) objects.push_back(&e);
    }
    if (2 * count < parsed_runs.size()) continue;
    ThemeArraySpec spec;
    spec.field_path = path;
    spec.coverage = static_cast<double>(count) / runs;
    spec.name_key = first_present(objects, kNameKeys);
    spec.quotes_key = first_present(objects, kQuoteKeys);
    spec.description_key = first_present(objects, kDescriptionKeys);
    schema.theme_arrays.push_back(std::move(spec));
  }
  if (schema.theme_arrays.empty()) throw NoThemeArraysFound();
  return schema;
}

std::vector<ThemeRecord> extract_themes(const json& parsed, const SchemaDescriptor& schema, Seed run_id,
                                        std::vector<std::string>* diagnostics) {
  std::vector<ThemeRecord> records;
  for (const ThemeArraySpec& spec : schema.theme_arrays) {
    const json* array = resolve_path(parsed, spec.field_path);
    if (array == nullptr || !array->is_array()) continue;
    std::size_t position = 0;
    for (const json& element : *array) {
      const std::size_t here = position++;
      if (!element.is_object()) continue;

      std::optional<std::string> name = string_field(element, spec.name_key);
      if (!name) {
        std::vector<std::string> strings;
        for (const auto& value : element) {
          if (value.is_string() && !trim(value.get<std::string>()).empty()) {
            strings.push_back(trim(value.get<std::string>()));
          }
        }
        if (strings.size() == 1) name = strings.front();
      }
      if (!name) {
        if (diagnostics) {
          diagnostics->push_back("skipped " + spec.field_path + "[" + std::to_string(here) +
                                 "]: no usable theme name");
        }
        continue;
      }

      ThemeRecord record;
      record.name = *name;
      record.description = string_field(element, spec.description_key).value_or(*name);
      if (spec.quotes_key) {
        if (const auto it = element.find(*spec.quotes_key); it != element.end()) {
          if (it->is_array()) {
            for (const auto& q : *it) {
              if (q.is_string()) record.quotes.push_back(q.get<std::string>());
            }
          } else if (it->is_string()) {
            record.quotes.push_back(it->get<std::string>());
          }
        }
      }
      record.run_id = run_id;
      record.field_path = spec.field_path;
      records.push_back(std::move(record));
    }
  }
  return records;
}

std::string embedding_text(const ThemeRecord& theme) {
  if (theme.description.empty() || theme.description == theme.name) return theme.name;
  return theme.name + ": " + theme.description;
}

}  // namespace thematic
