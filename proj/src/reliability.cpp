#include "thematic/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>

#include "thematic/orchestrator.hpp"

namespace thematic {

std::string_view to_string(AgreementLabel label) {
  switch (label) {
    case AgreementLabel::poor: return "poor";
    case AgreementLabel::fair: return "fair";
    case AgreementLabel::moderate: return "moderate";
    case AgreementLabel::substantial: return "substantial";
    case AgreementLabel::almost_perfect: return "almost perfect";
  }
  return "unknown";
}

std::string_view to_string(StabilityBand band) {
  switch (band) {
    case StabilityBand::stable: return "stable";
    case StabilityBand::moderate_variation: return "moderate variation";
    case StabilityBand::high_variation: return "high variation";
  }
  return "unknown";
}

std::string_view to_string(CosineBand band) {
  switch (band) {
    case CosineBand::low: return "low";
    case CosineBand::moderate: return "moderate";
    case CosineBand::high: return "high";
  }
  return "unknown";
}

std::size_t pair_count(std::size_t n) {
  if (n < 2) throw TooFewRuns();
  return n * (n - 1) / 2;
}

double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b, bool* degenerate) {
  if (a.size() != b.size()) throw LengthMismatch();
  if (a.empty()) throw EmptyVectors();
  std::int64_t both = 0, only_a = 0, only_b = 0, neither = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++both;
    else if (a[i]) ++only_a;
    else if (b[i]) ++only_b;
    else ++neither;
  }
  // With n items: p_o = agree / n and p_e = chance / n^2, so
  // kappa = (n * agree - chance) / (n^2 - chance), exact in integers.
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  const std::int64_t agree = both + neither;
  const std::int64_t pos_a = both + only_a;
  const std::int64_t pos_b = both + only_b;
  const std::int64_t chance = pos_a * pos_b + (n - pos_a) * (n - pos_b);
  if (degenerate) *degenerate = false;
  if (chance == n * n) {
    if (degenerate) *degenerate = true;
    return agree == n ? 1.0 : 0.0;
  }
  return static_cast<double>(n * agree - chance) / static_cast<double>(n * n - chance);
}

AgreementLabel landis_koch(double kappa) {
  constexpr double eps = 1e-12;
  if (!(kappa >= -1.0 - eps && kappa <= 1.0 + eps)) throw OutOfRange("kappa must lie in [-1, 1]");
  if (kappa >= 0.80) return AgreementLabel::almost_perfect;
  if (kappa >= 0.60) return AgreementLabel::substantial;
  if (kappa >= 0.40) return AgreementLabel::moderate;
  if (kappa >= 0.20) return AgreementLabel::fair;
  return AgreementLabel::poor;
}

StabilityBand stability_band(double kappa_range) {
  if (kappa_range < 0.25) return StabilityBand::stable;
  if (kappa_range <= 0.40) return StabilityBand::moderate_variation;
  return StabilityBand::high_variation;
}

CosineBand cosine_band(double mean_cosine) {
  if (mean_cosine > 0.90) return CosineBand::high;
  if (mean_cosine >= 0.80) return CosineBand::moderate;
  return CosineBand::low;
}

ReliabilitySummary kappa_matrix(const PresenceMatrix& pm) {
  const std::size_t runs = pm.runs.size();
  if (runs < 2) throw TooFewRuns();
  if (pm.cells.size() != runs) throw LengthMismatch();

  ReliabilitySummary summary;
  double sum = 0.0;
  summary.min_kappa = 1.0;
  summary.max_kappa = -1.0;
  for (std::size_t i = 0; i < runs; ++i) {
    for (std::size_t j = i + 1; j < runs; ++j) {
      bool degenerate = false;
      const double k = cohen_kappa(pm.cells[i], pm.cells[j], &degenerate);
      if (degenerate) {
        summary.diagnostics.push_back("runs " + std::to_string(pm.runs[i]) + " and " +
                                      std::to_string(pm.runs[j]) +
                                      ": chance agreement is 1, kappa set by convention");
      }
      summary.pairwise_kappa.push_back({pm.runs[i], pm.runs[j], k});
      sum += k;
      summary.min_kappa = std::min(summary.min_kappa, k);
      summary.max_kappa = std::max(summary.max_kappa, k);
    }
  }
  summary.mean_kappa = sum / static_cast<double>(summary.pairwise_kappa.size());
  summary.mean_kappa = std::clamp(summary.mean_kappa, summary.min_kappa, summary.max_kappa);
  summary.kappa_range = summary.max_kappa - summary.min_kappa;
  summary.label = landis_koch(summary.mean_kappa);
  summary.stability = stability_band(summary.kappa_range);
  return summary;
}

namespace {

constexpr std::uint64_t kSampleSeed = 0x7E3A11CEULL;

// Fixed pseudo-random subset of `count` positions out of `n`, via a partial
// Fisher-Yates shuffle with an explicit modulo draw for portability.
std::vector<std::size_t> sample_positions(std::size_t n, std::size_t count) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(kSampleSeed ^ n);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double directed(const ThemeScorer& scorer, std::span<const std::size_t> from,
                std::span<const std::size_t> to, std::size_t cap) {
  std::vector<std::size_t> positions;
  if (from.size() > cap) {
    positions = sample_positions(from.size(), cap);
  } else {
    positions.resize(from.size());
    std::iota(positions.begin(), positions.end(), 0);
  }
  double sum = 0.0;
  for (std::size_t p : positions) {
    double best = 0.0;
    for (std::size_t t : to) best = std::max(best, scorer.similarity(from[p], t));
    sum += best;
  }
  return sum / static_cast<double>(positions.size());
}

}  // namespace

double run_similarity(const ThemeScorer& scorer, std::span<const std::size_t> run_i,
                      std::span<const std::size_t> run_j, std::size_t sample_cap) {
  if (run_i.empty() || run_j.empty()) throw EmptyRun();
  if (sample_cap == 0) throw InvalidArgument("sample cap must be positive");
  const double value = 0.5 * (directed(scorer, run_i, run_j, sample_cap) +
                              directed(scorer, run_j, run_i, sample_cap));
  return std::clamp(value, 0.0, 1.0);
}

double run_similarity(std::span<const ThemeRecord> themes_i, std::span<const ThemeRecord> themes_j,
                      const EmbeddingBackend& backend, std::size_t sample_cap) {
  if (themes_i.empty() || themes_j.empty()) throw EmptyRun();
  std::vector<ThemeRecord> all(themes_i.begin(), themes_i.end());
  all.insert(all.end(), themes_j.begin(), themes_j.end());
  std::vector<std::size_t> groups(all.size(), 0);
  std::fill(groups.begin() + static_cast<std::ptrdiff_t>(themes_i.size()), groups.end(), 1);
  const ThemeScorer scorer(std::move(all), backend, kEmbeddingCapPerRun, std::move(groups));

  std::vector<std::size_t> a(themes_i.size());
  std::vector<std::size_t> b(themes_j.size());
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), themes_i.size());
  return run_similarity(scorer, a, b, sample_cap);
}

std::vector<CrossModelMatch> cross_model_compare(const AnalysisReport& report_a,
                                                 const AnalysisReport& report_b,
                                                 const EmbeddingBackend& backend) {
  if (report_a.consensus.empty() || report_b.consensus.empty()) throw EmptyConsensus();
  std::vector<ThemeRecord> all;
  std::vector<std::size_t> groups;
  for (const auto* report : {&report_a, &report_b}) {
    for (const ConsensusTheme& t : report->consensus) {
      ThemeRecord r;
      r.name = t.name;
      r.description = t.description;
      all.push_back(std::move(r));
      groups.push_back(report == &report_a ? 0 : 1);
    }
  }
  const ThemeScorer scorer(std::move(all), backend, kNoCap, std::move(groups));
  const double threshold = report_a.config.sim_threshold > 0.0 ? report_a.config.sim_threshold
                                                                : kDefaultSimThreshold;
  std::vector<CrossModelMatch> matches;
  const std::size_t na = report_a.consensus.size();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < report_b.consensus.size(); ++j) {
      const double s = scorer.similarity(i, na + j);
      matches.push_back({report_a.consensus[i].name, report_b.consensus[j].name, s, s > threshold});
    }
  }
  return matches;
}

}  // namespace thematic
