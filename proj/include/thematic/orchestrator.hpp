#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "thematic/consensus.hpp"
#include "thematic/embedding.hpp"
#include "thematic/gateway.hpp"
#include "thematic/json_extract.hpp"
#include "thematic/preprocessing.hpp"
#include "thematic/prompt.hpp"
#include "thematic/reliability.hpp"
#include "thematic/themes.hpp"

namespace thematic {

inline constexpr int kReportFormatVersion = 1;
inline constexpr std::size_t kMaxSeeds = 6;

std::vector<Seed> default_seeds();

struct ChunkingOptions {
  std::size_t max_chunk_chars = kDefaultMaxChunkChars;
  double overlap_fraction = kDefaultOverlapFraction;

  bool operator==(const ChunkingOptions&) const = default;
};

struct AnalysisConfig {
  std::vector<Seed> seeds = default_seeds();
  double temperature = 0.7;
  PromptTemplate prompt = default_prompt();
  ProviderConfig provider;
  double sim_threshold = kDefaultSimThreshold;
  double consensus_threshold = kDefaultConsensusThreshold;
  ChunkingOptions chunking;
  SchemaMode mode = SchemaMode::default_schema;
  int max_output_tokens = 8192;

  // Throws InvalidArgument describing the first violated constraint.
  void validate() const;
};

enum class RunStatus { ok, parse_failed, api_failed };
std::string_view to_string(RunStatus status);

struct ChunkOutcome {
  std::size_t chunk_index = 0;
  std::string raw_text;
  std::optional<ExtractionStage> stage;
  std::string error;  // empty on success
  int attempts = 0;

  bool operator==(const ChunkOutcome&) const = default;
};

struct RunResult {
  Seed seed = 0;
  RunStatus status = RunStatus::ok;
  std::vector<ChunkOutcome> chunks;
  std::vector<ThemeRecord> themes;  // empty unless status == ok
  int attempts = 0;                 // summed over chunks
  std::vector<std::string> diagnostics;
  std::map<std::string, std::string> provider_echo;

  bool operator==(const RunResult&) const = default;
};

// Configuration as echoed into reports. Holds no secrets.
struct ConfigEcho {
  std::vector<Seed> seeds;
  double temperature = 0.0;
  std::string prompt;
  std::string provider_kind;
  std::string provider_endpoint;
  std::string model;
  bool api_key_supplied = false;
  double sim_threshold = 0.0;
  double consensus_threshold = 0.0;
  ChunkingOptions chunking;
  std::string mode;
  std::string embedding_backend;

  bool operator==(const ConfigEcho&) const = default;
};

struct DocumentSummary {
  std::size_t char_count = 0;
  std::size_t line_count = 0;
  std::size_t chunk_count = 0;
  std::size_t invalid_sequences = 0;
  std::vector<std::string> speakers;
  std::size_t timestamp_count = 0;

  bool operator==(const DocumentSummary&) const = default;
};

struct AnalysisReport {
  int format_version = kReportFormatVersion;
  std::string created_at;
  ConfigEcho config;
  DocumentSummary document;
  std::vector<RunResult> runs;  // in configured seed order
  std::size_t successful_runs = 0;
  std::optional<SchemaDescriptor> schema;
  std::vector<EquivalenceClass> classes;  // every cluster, unfiltered
  std::optional<PresenceMatrix> presence;
  std::optional<ReliabilitySummary> reliability;  // present iff >= 2 runs succeeded
  double consensus_threshold = kDefaultConsensusThreshold;
  std::vector<ConsensusTheme> consensus;
  std::vector<std::string> warnings;

  bool operator==(const AnalysisReport&) const = default;
};

struct ProgressEvent {
  std::string stage;
  std::size_t current = 0;
  std::size_t total = 0;
  std::string message;
};

using ProgressCallback = std::function<void(const ProgressEvent&)>;

struct RunOptions {
  std::shared_ptr<Gateway> gateway;                    // default: a fresh Gateway
  std::shared_ptr<const EmbeddingBackend> embedder;    // default: reference embedder
  ProgressCallback on_progress;
  // Fixed-clock mode: stamps this value and omits measured latencies.
  std::function<std::string()> clock;
  std::size_t embedding_cap = kEmbeddingCapPerRun;
  std::size_t similarity_sample_cap = kSimilaritySampleCap;
};

class AllRunsFailed : public Error {
 public:
  explicit AllRunsFailed(const std::string& detail) : Error("every run failed: " + detail) {}
};

class InvalidThreshold : public Error {
 public:
  using Error::Error;
};

/// Renders, calls and parses every seed (chunk by chunk), then clusters the
/// surviving runs' themes, measures kappa and run similarity, and filters the
/// consensus. Failed runs stay in the report but are excluded from matrices
/// and denominators.
AnalysisReport run_ensemble(const AnalysisConfig& config, const TranscriptDocument& doc,
                            const RunOptions& options = {});

using ChunkThemes = std::pair<std::size_t, std::vector<ThemeRecord>>;

/// Merges one run's chunk-level themes into run-level themes by clustering
/// them; quotes are unioned. A single chunk passes through unchanged.
std::vector<ThemeRecord> synthesize_chunks(std::span<const ChunkThemes> per_chunk_themes,
                                           const EmbeddingBackend& backend,
                                           double sim_threshold = kDefaultSimThreshold,
                                           std::size_t embedding_cap = kEmbeddingCapPerRun);

/// Re-filters the stored classes at a new threshold without calling any
/// provider.
AnalysisReport recompute_consensus(const AnalysisReport& report, double new_threshold);

std::string current_utc_timestamp();

}  // namespace thematic
