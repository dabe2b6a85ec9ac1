#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thematic/embedding.hpp"
#include "thematic/similarity.hpp"
#include "thematic/themes.hpp"

namespace thematic {

inline constexpr double kDefaultSimThreshold = 0.70;
inline constexpr double kDefaultConsensusThreshold = 0.50;
inline constexpr double kHighConfidenceFraction = 0.75;
inline constexpr std::size_t kMaxMemberQuotes = 10;

enum class ConfidenceTier { high, moderate, below_threshold };
std::string_view to_string(ConfidenceTier tier);
ConfidenceTier confidence_tier_from_string(std::string_view name);

struct EquivalenceClass {
  std::size_t id = 0;
  std::vector<ThemeRecord> members;
  ThemeRecord representative;
  std::vector<Seed> runs_covered;  // ascending
  std::size_t frequency = 0;       // distinct runs
  double consistency = 0.0;        // percent, one decimal
  ConfidenceTier tier = ConfidenceTier::below_threshold;
  double diameter = 1.0;           // lowest pairwise similarity among members

  bool operator==(const EquivalenceClass&) const = default;
};

/// Serialized shape of a retained class.
struct ConsensusTheme {
  std::size_t class_id = 0;
  std::string name;
  std::string description;
  double consistency_pct = 0.0;
  std::size_t frequency = 0;
  std::size_t n_runs = 0;
  ConfidenceTier tier = ConfidenceTier::below_threshold;
  std::vector<std::string> member_quotes;  // deduplicated, at most 10

  bool operator==(const ConsensusTheme&) const = default;
};

/// Single-linkage clustering: themes are joined when their similarity is
/// strictly above `sim_threshold`, and classes are the connected components.
/// The representative is the member nearest the class centroid (ties: lowest
/// run seed, then name). Classes are ordered by frequency (descending), then
/// representative name, and numbered in that order. Consistency and tier are
/// left for count_frequency.
std::vector<EquivalenceClass> cluster_themes(const ThemeScorer& scorer,
                                             double sim_threshold = kDefaultSimThreshold);

std::vector<EquivalenceClass> cluster_themes(std::span<const ThemeRecord> all_themes,
                                             const EmbeddingBackend& backend,
                                             double sim_threshold = kDefaultSimThreshold);

// 100 * frequency / n_runs rounded half up to one decimal.
double consistency_pct(std::size_t frequency, std::size_t n_runs);

ConfidenceTier confidence_tier(std::size_t frequency, std::size_t n_runs,
                               double consensus_threshold = kDefaultConsensusThreshold);

EquivalenceClass count_frequency(EquivalenceClass cls, std::size_t n_runs,
                                 double consensus_threshold = kDefaultConsensusThreshold);

/// Keeps classes with frequency / n_runs >= threshold, sorted by consistency
/// (descending) then representative name.
std::vector<EquivalenceClass> consensus_filter(std::span<const EquivalenceClass> classes, std::size_t n_runs,
                                               double consensus_threshold = kDefaultConsensusThreshold);

ConsensusTheme to_consensus_theme(const EquivalenceClass& cls, std::size_t n_runs);

}  // namespace thematic
