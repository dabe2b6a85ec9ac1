#pragma once

#include <cstddef>
#include <string>

#include "thematic/json_extract.hpp"
#include "thematic/mock_provider.hpp"

namespace thematic {

struct SimulationOptions {
  std::size_t trials = 10000;
  std::size_t runs_small = 3;
  std::size_t runs_large = 6;
  Seed base_seed = 1;
  SchemaMode mode = SchemaMode::default_schema;
};

struct SimulationResult {
  std::size_t trials = 0;
  std::size_t runs_small = 0;
  std::size_t runs_large = 0;
  double per_run_mean = 0.0;  // themes per run, pooled over every run
  double per_run_sd = 0.0;
  double mean_small = 0.0;    // mean over trials of the small-ensemble mean
  double mean_large = 0.0;
  double se_small = 0.0;      // spread of the ensemble mean across trials
  double se_large = 0.0;
  double ratio = 0.0;         // se_small / se_large
  double expected_ratio = 0.0;
  std::size_t failed_runs = 0;
};

/// Regenerates `trials` mock ensembles through the full extraction path and
/// measures how the standard error of the mean theme count shrinks from a
/// small to a large ensemble. The small ensemble is a prefix of the large one.
SimulationResult simulate_se_ratio(const MockScenario& scenario, const SimulationOptions& options = {});

std::string format_simulation_table(const SimulationResult& result);

}  // namespace thematic
