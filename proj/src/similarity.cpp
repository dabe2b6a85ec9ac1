#include "thematic/similarity.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace thematic {

ThemeScorer::ThemeScorer(std::vector<ThemeRecord> themes, const EmbeddingBackend& backend,
                         std::size_t per_group_cap, std::vector<std::size_t> groups)
    : themes_(std::move(themes)) {
  if (!groups.empty() && groups.size() != themes_.size()) {
    throw InvalidArgument("group labels must match the theme count");
  }
  texts_.reserve(themes_.size());
  for (const ThemeRecord& t : themes_) texts_.push_back(embedding_text(t));
  vectors_ = embed(backend, texts_);

  std::map<std::size_t, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < themes_.size(); ++i) {
    const std::size_t g = groups.empty() ? static_cast<std::size_t>(themes_[i].run_id) : groups[i];
    by_group[g].push_back(i);
  }
  uses_embedding_.assign(themes_.size(), false);
  for (auto& [group, members] : by_group) {
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return themes_[a].description.size() > themes_[b].description.size();
    });
    const std::size_t keep = std::min(per_group_cap, members.size());
    for (std::size_t k = 0; k < keep; ++k) uses_embedding_[members[k]] = true;
  }
}

double ThemeScorer::similarity(std::size_t i, std::size_t j) const {
  if (uses_embedding_[i] && uses_embedding_[j]) return cosine(vectors_[i], vectors_[j]);
  return string_similarity(texts_[i], texts_[j]);
}

}  // namespace thematic
