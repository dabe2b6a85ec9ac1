#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thematic/embedding.hpp"
#include "thematic/error.hpp"
#include "thematic/prompt.hpp"
#include "thematic/similarity.hpp"
#include "thematic/themes.hpp"

namespace thematic {

struct AnalysisReport;

class TooFewRuns : public Error {
 public:
  TooFewRuns() : Error("pairwise reliability needs at least two runs") {}
};
class LengthMismatch : public Error {
 public:
  LengthMismatch() : Error("presence vectors differ in length") {}
};
class EmptyVectors : public Error {
 public:
  EmptyVectors() : Error("presence vectors are empty") {}
};
class EmptyRun : public Error {
 public:
  EmptyRun() : Error("run has no themes to compare") {}
};
class OutOfRange : public Error {
 public:
  using Error::Error;
};
class EmptyConsensus : public Error {
 public:
  EmptyConsensus() : Error("report has no consensus themes") {}
};

/// Theme presence per run. cells[r][c] is true when run r contributes a
/// member to class c.
struct PresenceMatrix {
  std::vector<Seed> runs;
  std::vector<std::size_t> classes;
  std::vector<std::vector<bool>> cells;

  bool operator==(const PresenceMatrix&) const = default;
};

struct PairValue {
  Seed a = 0;
  Seed b = 0;
  double value = 0.0;

  bool operator==(const PairValue&) const = default;
};

enum class AgreementLabel { poor, fair, moderate, substantial, almost_perfect };
enum class StabilityBand { stable, moderate_variation, high_variation };
enum class CosineBand { low, moderate, high };

std::string_view to_string(AgreementLabel label);
std::string_view to_string(StabilityBand band);
std::string_view to_string(CosineBand band);

struct ReliabilitySummary {
  std::vector<PairValue> pairwise_kappa;  // i < j in run order
  double mean_kappa = 0.0;
  double min_kappa = 0.0;
  double max_kappa = 0.0;
  double kappa_range = 0.0;
  std::vector<PairValue> pairwise_cosine;
  double mean_cosine = 0.0;
  AgreementLabel label = AgreementLabel::poor;
  StabilityBand stability = StabilityBand::stable;
  CosineBand cosine_band = CosineBand::low;
  std::vector<std::string> diagnostics;

  bool operator==(const ReliabilitySummary&) const = default;
};

std::size_t pair_count(std::size_t n);

/// Cohen's kappa on two presence vectors, computed exactly from the 2x2
/// contingency counts. When chance agreement is 1 the ratio is undefined; we
/// return 1.0 for perfect agreement and 0.0 otherwise, and set `degenerate`.
double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b, bool* degenerate = nullptr);

/// Kappa for every unordered run pair plus summary statistics and labels.
/// Cosine fields are left empty.
ReliabilitySummary kappa_matrix(const PresenceMatrix& pm);

inline constexpr std::size_t kSimilaritySampleCap = 10;

/// Symmetric best-match mean between two runs, clamped to [0, 1]. Each
/// direction averages, over the source run's themes, the best similarity
/// against the other run. A source run with more than `sample_cap` themes is
/// represented by a fixed pseudo-random sample of `sample_cap` of them.
double run_similarity(const ThemeScorer& scorer, std::span<const std::size_t> run_i,
                      std::span<const std::size_t> run_j, std::size_t sample_cap = kSimilaritySampleCap);

double run_similarity(std::span<const ThemeRecord> themes_i, std::span<const ThemeRecord> themes_j,
                      const EmbeddingBackend& backend, std::size_t sample_cap = kSimilaritySampleCap);

// Lower band bounds inclusive: 0.80 is almost perfect, 0.60 substantial.
AgreementLabel landis_koch(double kappa);
// < 0.25 stable, 0.25..0.40 moderate variation, > 0.40 high variation.
StabilityBand stability_band(double kappa_range);
// Mean cosine as a fraction: > 0.90 high, 0.80..0.90 moderate, < 0.80 low.
CosineBand cosine_band(double mean_cosine);

struct CrossModelMatch {
  std::string theme_a;
  std::string theme_b;
  double similarity = 0.0;
  bool model_invariant = false;  // similarity above the clustering threshold
};

/// Similarity of every pair of consensus themes across two reports.
std::vector<CrossModelMatch> cross_model_compare(const AnalysisReport& report_a,
                                                 const AnalysisReport& report_b,
                                                 const EmbeddingBackend& backend);

}  // namespace thematic
