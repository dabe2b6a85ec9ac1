#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "thematic/embedding.hpp"
#include "thematic/themes.hpp"

namespace thematic {

inline constexpr std::size_t kEmbeddingCapPerRun = 10;
inline constexpr std::size_t kNoCap = std::numeric_limits<std::size_t>::max();

/// Pairwise theme similarity over a fixed theme set. Within each group
/// (by default, each run) only the `per_group_cap` themes with the longest
/// descriptions are compared by embedding cosine; a pair involving any other
/// theme falls back to string_similarity of the embedding texts.
class ThemeScorer {
 public:
  ThemeScorer(std::vector<ThemeRecord> themes, const EmbeddingBackend& backend,
              std::size_t per_group_cap = kEmbeddingCapPerRun, std::vector<std::size_t> groups = {});

  std::size_t size() const noexcept { return themes_.size(); }
  const ThemeRecord& theme(std::size_t i) const { return themes_[i]; }
  std::span<const ThemeRecord> themes() const noexcept { return themes_; }

  // Normalized embedding, available for every theme.
  const EmbeddingVector& vector(std::size_t i) const { return vectors_[i]; }
  bool uses_embedding(std::size_t i) const { return uses_embedding_[i]; }

  double similarity(std::size_t i, std::size_t j) const;

 private:
  std::vector<ThemeRecord> themes_;
  std::vector<std::string> texts_;
  std::vector<EmbeddingVector> vectors_;
  std::vector<bool> uses_embedding_;
};

}  // namespace thematic
