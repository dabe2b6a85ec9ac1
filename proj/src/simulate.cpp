#include "thematic/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "thematic/error.hpp"
#include "thematic/themes.hpp"

namespace thematic {

using nlohmann::json;

namespace {

struct Moments {
  double n = 0, sum = 0, sum_sq = 0;
  void add(double x) {
    n += 1;
    sum += x;
    sum_sq += x * x;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double sd() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sum_sq - n * m * m) / (n - 1)));
  }
};

}  // namespace

SimulationResult simulate_se_ratio(const MockScenario& scenario, const SimulationOptions& options) {
  if (options.trials < 2) throw InvalidArgument("simulation needs at least two trials");
  if (options.runs_small == 0 || options.runs_small >= options.runs_large) {
    throw InvalidArgument("runs_small must be positive and below runs_large");
  }
  SimulationResult result;
  result.trials = options.trials;
  result.runs_small = options.runs_small;
  result.runs_large = options.runs_large;
  result.expected_ratio = std::sqrt(static_cast<double>(options.runs_large) / options.runs_small);

  Moments per_run, small, large;
  std::vector<json> parsed;
  std::vector<double> counts(options.runs_large);
  for (std::size_t t = 0; t < options.trials; ++t) {
    parsed.clear();
    std::vector<bool> ok(options.runs_large, false);
    for (std::size_t k = 0; k < options.runs_large; ++k) {
      const Seed seed = options.base_seed + t * options.runs_large + k;
      MockOutcome out = mock_generate(scenario, seed, 1);
      if (!out.text) continue;
      try {
        parsed.push_back(extract_json(*out.text, options.mode).value);
        ok[k] = true;
      } catch (const ExtractionError&) {
      }
    }
    std::optional<SchemaDescriptor> schema;
    try {
      if (!parsed.empty()) schema = detect_schema(parsed);
    } catch (const NoThemeArraysFound&) {
    }
    std::size_t next = 0;
    for (std::size_t k = 0; k < options.runs_large; ++k) {
      counts[k] = 0.0;
      if (!ok[k]) {
        ++result.failed_runs;
        continue;
      }
      const json& doc = parsed[next++];
      if (schema) counts[k] = static_cast<double>(extract_themes(doc, *schema, 0).size());
      per_run.add(counts[k]);
    }
    double s = 0.0;
    for (std::size_t k = 0; k < options.runs_large; ++k) {
      s += counts[k];
      if (k + 1 == options.runs_small) small.add(s / static_cast<double>(options.runs_small));
    }
    large.add(s / static_cast<double>(options.runs_large));
  }

  result.per_run_mean = per_run.mean();
  result.per_run_sd = per_run.sd();
  result.mean_small = small.mean();
  result.mean_large = large.mean();
  result.se_small = small.sd();
  result.se_large = large.sd();
  result.ratio = result.se_large > 0 ? result.se_small / result.se_large : std::nan("");
  return result;
}

std::string format_simulation_table(const SimulationResult& r) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "trials: %zu   themes per run: mean %.4f, sd %.4f   failed runs: %zu\n\n", r.trials,
                r.per_run_mean, r.per_run_sd, r.failed_runs);
  out += buf;
  out += "runs  mean_count  empirical_se  sd/sqrt(runs)\n";
  for (auto [runs, mean, se] : {std::tuple{r.runs_small, r.mean_small, r.se_small},
                                std::tuple{r.runs_large, r.mean_large, r.se_large}}) {
    std::snprintf(buf, sizeof buf, "%4zu  %10.4f  %12.4f  %13.4f\n", runs, mean, se,
                  r.per_run_sd / std::sqrt(static_cast<double>(runs)));
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "\nse ratio (%zu vs %zu runs): %.4f   expected sqrt(%zu/%zu) = %.4f\n", r.runs_small,
                r.runs_large, r.ratio, r.runs_large, r.runs_small, r.expected_ratio);
  out += buf;
  return out;
}

}  // namespace thematic
