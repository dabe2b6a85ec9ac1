#include "thematic/consensus.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

namespace thematic {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::size_t pick_representative(const ThemeScorer& scorer, const std::vector<std::size_t>& members) {
  EmbeddingVector centroid;
  for (std::size_t m : members) {
    for (std::size_t k = 0; k < kEmbeddingDim; ++k) centroid.values[k] += scorer.vector(m).values[k];
  }
  for (double& v : centroid.values) v /= static_cast<double>(members.size());

  auto distance = [&](std::size_t m) {
    double d = 0.0;
    for (std::size_t k = 0; k < kEmbeddingDim; ++k) {
      const double diff = scorer.vector(m).values[k] - centroid.values[k];
      d += diff * diff;
    }
    return d;
  };

  std::size_t best = members.front();
  double best_distance = distance(best);
  for (std::size_t m : members) {
    const double d = distance(m);
    const ThemeRecord& cand = scorer.theme(m);
    const ThemeRecord& cur = scorer.theme(best);
    const bool tie = std::abs(d - best_distance) <= 1e-12;
    if ((!tie && d < best_distance) ||
        (tie && std::tie(cand.run_id, cand.name) < std::tie(cur.run_id, cur.name))) {
      best = m;
      best_distance = d;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(ConfidenceTier tier) {
  switch (tier) {
    case ConfidenceTier::high: return "high";
    case ConfidenceTier::moderate: return "moderate";
    case ConfidenceTier::below_threshold: return "below_threshold";
  }
  return "unknown";
}

ConfidenceTier confidence_tier_from_string(std::string_view name) {
  if (name == "high") return ConfidenceTier::high;
  if (name == "moderate") return ConfidenceTier::moderate;
  if (name == "below_threshold") return ConfidenceTier::below_threshold;
  throw InvalidArgument("unknown confidence tier: " + std::string(name));
}

std::vector<EquivalenceClass> cluster_themes(const ThemeScorer& scorer, double sim_threshold) {
  if (!(sim_threshold > 0.0 && sim_threshold < 1.0)) {
    throw InvalidArgument("sim_threshold must lie in (0, 1)");
  }
  const std::size_t n = scorer.size();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (scorer.similarity(i, j) > sim_threshold) sets.unite(i, j);
    }
  }

  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> component_of(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (component_of[root] == n) {
      component_of[root] = components.size();
      components.emplace_back();
    }
    components[component_of[root]].push_back(i);
  }

  std::vector<EquivalenceClass> classes;
  classes.reserve(components.size());
  for (const auto& members : components) {
    EquivalenceClass cls;
    std::set<Seed> runs;
    for (std::size_t m : members) {
      cls.members.push_back(scorer.theme(m));
      runs.insert(scorer.theme(m).run_id);
    }
    cls.runs_covered.assign(runs.begin(), runs.end());
    cls.frequency = runs.size();
    cls.representative = scorer.theme(pick_representative(scorer, members));
    double diameter = 1.0;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        diameter = std::min(diameter, scorer.similarity(members[a], members[b]));
      }
    }
    cls.diameter = diameter;
    classes.push_back(std::move(cls));
  }

  std::stable_sort(classes.begin(), classes.end(), [](const EquivalenceClass& a, const EquivalenceClass& b) {
    using Key = std::tuple<long long, const std::string&, Seed, const std::string&>;
    const auto key = [](const EquivalenceClass& c) {
      return Key(-static_cast<long long>(c.frequency), c.representative.name, c.representative.run_id,
                 c.representative.description);
    };
    return key(a) < key(b);
  });
  for (std::size_t i = 0; i < classes.size(); ++i) classes[i].id = i;
  return classes;
}

std::vector<EquivalenceClass> cluster_themes(std::span<const ThemeRecord> all_themes,
                                             const EmbeddingBackend& backend, double sim_threshold) {
  if (all_themes.empty()) throw InvalidArgument("cluster_themes needs at least one theme");
  ThemeScorer scorer({all_themes.begin(), all_themes.end()}, backend);
  return cluster_themes(scorer, sim_threshold);
}

double consistency_pct(std::size_t frequency, std::size_t n_runs) {
  if (n_runs == 0) throw InvalidArgument("n_runs must be at least 1");
  // tenths of a percent, half up: floor((2000 f + n) / 2n)
  const unsigned long long tenths = (2000ULL * frequency + n_runs) / (2ULL * n_runs);
  return static_cast<double>(tenths) / 10.0;
}

ConfidenceTier confidence_tier(std::size_t frequency, std::size_t n_runs, double consensus_threshold) {
  if (n_runs == 0) throw InvalidArgument("n_runs must be at least 1");
  const double fraction = static_cast<double>(frequency) / static_cast<double>(n_runs);
  constexpr double eps = 1e-12;
  if (fraction + eps >= kHighConfidenceFraction) return ConfidenceTier::high;
  if (fraction + eps >= consensus_threshold) return ConfidenceTier::moderate;
  return ConfidenceTier::below_threshold;
}

EquivalenceClass count_frequency(EquivalenceClass cls, std::size_t n_runs, double consensus_threshold) {
  std::set<Seed> runs;
  for (const ThemeRecord& m : cls.members) runs.insert(m.run_id);
  cls.runs_covered.assign(runs.begin(), runs.end());
  cls.frequency = runs.size();
  cls.consistency = consistency_pct(cls.frequency, n_runs);
  cls.tier = confidence_tier(cls.frequency, n_runs, consensus_threshold);
  return cls;
}

std::vector<EquivalenceClass> consensus_filter(std::span<const EquivalenceClass> classes, std::size_t n_runs,
                                               double consensus_threshold) {
  if (!(consensus_threshold > 0.0 && consensus_threshold <= 1.0)) {
    throw InvalidArgument("consensus threshold must lie in (0, 1]");
  }
  if (n_runs == 0) throw InvalidArgument("n_runs must be at least 1");
  std::vector<EquivalenceClass> kept;
  for (const EquivalenceClass& cls : classes) {
    const double fraction = static_cast<double>(cls.frequency) / static_cast<double>(n_runs);
    if (fraction + 1e-12 >= consensus_threshold) {
      kept.push_back(count_frequency(cls, n_runs, consensus_threshold));
    }
  }
  std::stable_sort(kept.begin(), kept.end(), [](const EquivalenceClass& a, const EquivalenceClass& b) {
    if (a.consistency != b.consistency) return a.consistency > b.consistency;
    return a.representative.name < b.representative.name;
  });
  return kept;
}

ConsensusTheme to_consensus_theme(const EquivalenceClass& cls, std::size_t n_runs) {
  ConsensusTheme out;
  out.class_id = cls.id;
  out.name = cls.representative.name;
  out.description = cls.representative.description;
  out.consistency_pct = cls.consistency;
  out.frequency = cls.frequency;
  out.n_runs = n_runs;
  out.tier = cls.tier;
  std::set<std::string> seen;
  for (const ThemeRecord& m : cls.members) {
    for (const std::string& q : m.quotes) {
      if (out.member_quotes.size() >= kMaxMemberQuotes) break;
      if (seen.insert(q).second) out.member_quotes.push_back(q);
    }
  }
  return out;
}

}  // namespace thematic
