#include "thematic/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <future>
#include <mutex>
#include <set>

namespace thematic {

using nlohmann::json;

std::vector<Seed> default_seeds() { return {42, 123, 456, 789, 1011, 1213}; }

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::parse_failed: return "parse_failed";
    case RunStatus::api_failed: return "api_failed";
  }
  return "unknown";
}

void AnalysisConfig::validate() const {
  if (seeds.empty() || seeds.size() > kMaxSeeds) throw InvalidArgument("configure between 1 and 6 seeds");
  if (std::set<Seed>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw InvalidArgument("seeds must be distinct");
  }
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw InvalidArgument("temperature must lie in [0.0, 2.0]");
  if (!(sim_threshold > 0.0 && sim_threshold < 1.0)) throw InvalidArgument("sim_threshold must lie in (0, 1)");
  if (!(consensus_threshold > 0.0 && consensus_threshold <= 1.0)) {
    throw InvalidArgument("consensus_threshold must lie in (0, 1]");
  }
  if (chunking.max_chunk_chars < kMinChunkChars) throw InvalidArgument("max_chunk_chars must be at least 200");
  if (!(chunking.overlap_fraction >= 0.0 && chunking.overlap_fraction <= 0.5)) {
    throw InvalidArgument("overlap_fraction must lie in [0, 0.5]");
  }
  if (max_output_tokens <= 0) throw InvalidArgument("max_output_tokens must be positive");
  if (prompt.text_var == TextVar::none) throw MissingTextPlaceholder();
  provider.validate();
}

std::string current_utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::vector<ThemeRecord> synthesize_chunks(std::span<const ChunkThemes> per_chunk_themes,
                                           const EmbeddingBackend& backend, double sim_threshold,
                                           std::size_t embedding_cap) {
  if (per_chunk_themes.empty()) throw InvalidArgument("synthesize_chunks needs at least one chunk");
  if (per_chunk_themes.size() == 1) return per_chunk_themes.front().second;

  std::vector<ThemeRecord> all;
  for (const auto& [chunk, themes] : per_chunk_themes) all.insert(all.end(), themes.begin(), themes.end());
  if (all.empty()) return {};

  const std::vector<std::size_t> one_group(all.size(), 0);
  const ThemeScorer scorer(std::move(all), backend, embedding_cap, one_group);
  std::vector<ThemeRecord> merged;
  for (const EquivalenceClass& cls : cluster_themes(scorer, sim_threshold)) {
    ThemeRecord theme = cls.representative;
    theme.quotes.clear();
    std::set<std::string> seen;
    for (const ThemeRecord& m : cls.members) {
      for (const std::string& q : m.quotes) {
        if (seen.insert(q).second) theme.quotes.push_back(q);
      }
    }
    merged.push_back(std::move(theme));
  }
  return merged;
}

namespace {

struct SeedWork {
  RunResult result;
  std::vector<json> parsed;  // one per chunk when status == ok
};

SeedWork process_seed(const AnalysisConfig& config, const TranscriptDocument& doc, Seed seed, Gateway& gateway) {
  SeedWork work;
  work.result.seed = seed;
  for (const Chunk& chunk : doc.chunks) {
    ChunkOutcome outcome;
    outcome.chunk_index = chunk.index;
    CompletionRequest request;
    request.prompt = render_prompt(config.prompt, seed, chunk.text);
    request.temperature = config.temperature;
    request.seed = seed;
    request.max_output_tokens = config.max_output_tokens;
    try {
      CompletionResult completion = gateway.complete(config.provider, request);
      outcome.raw_text = std::move(completion.raw_text);
      outcome.attempts = completion.attempts;
      work.result.provider_echo = std::move(completion.provider_echo);
    } catch (const ProviderError& e) {
      outcome.error = e.what();
      outcome.attempts = e.attempts();
      work.result.status = RunStatus::api_failed;
    }
    work.result.attempts += outcome.attempts;
    if (work.result.status == RunStatus::ok) {
      try {
        ExtractionOutcome extracted = extract_json(outcome.raw_text, config.mode);
        outcome.stage = extracted.stage;
        for (auto& d : extracted.diagnostics) {
          work.result.diagnostics.push_back("chunk " + std::to_string(chunk.index) + ": " + d);
        }
        work.parsed.push_back(std::move(extracted.value));
      } catch (const ExtractionError& e) {
        outcome.error = e.what();
        work.result.status = RunStatus::parse_failed;
      }
    }
    work.result.chunks.push_back(std::move(outcome));
    if (work.result.status != RunStatus::ok) {
      work.parsed.clear();
      break;
    }
  }
  return work;
}

ConfigEcho echo_config(const AnalysisConfig& config, const EmbeddingBackend& embedder) {
  ConfigEcho echo;
  echo.seeds = config.seeds;
  echo.temperature = config.temperature;
  echo.prompt = config.prompt.body;
  echo.provider_kind = std::string(to_string(config.provider.kind));
  echo.provider_endpoint = config.provider.kind == ProviderKind::mock ? "" : config.provider.effective_endpoint();
  echo.model = config.provider.model;
  echo.api_key_supplied = !config.provider.api_key.empty();
  echo.sim_threshold = config.sim_threshold;
  echo.consensus_threshold = config.consensus_threshold;
  echo.chunking = config.chunking;
  echo.mode = std::string(to_string(config.mode));
  echo.embedding_backend = embedder.name();
  return echo;
}

}  // namespace

AnalysisReport run_ensemble(const AnalysisConfig& config, const TranscriptDocument& input,
                            const RunOptions& options) {
  config.validate();
  const TranscriptDocument doc =
      input.chunks.empty()
          ? chunk_document(input, config.chunking.max_chunk_chars, config.chunking.overlap_fraction)
          : input;
  const std::shared_ptr<Gateway> gateway = options.gateway ? options.gateway : std::make_shared<Gateway>();
  const std::shared_ptr<const EmbeddingBackend> embedder =
      options.embedder ? options.embedder : reference_embedder();

  std::mutex progress_mutex;
  auto emit = [&](std::string stage, std::size_t current, std::size_t total, std::string message) {
    if (!options.on_progress) return;
    std::lock_guard lock(progress_mutex);
    options.on_progress({std::move(stage), current, total, std::move(message)});
  };

  AnalysisReport report;
  report.created_at = options.clock ? options.clock() : current_utc_timestamp();
  report.config = echo_config(config, *embedder);
  report.consensus_threshold = config.consensus_threshold;
  report.document = {doc.char_count, doc.line_count, doc.chunks.size(), doc.invalid_sequences,
                     doc.metadata.speakers, doc.metadata.timestamps.size()};

  // Fan out one task per seed; the gateway enforces the provider cap.
  const std::size_t n_seeds = config.seeds.size();
  emit("runs", 0, n_seeds, "Running " + std::to_string(n_seeds) + " analyses");
  std::atomic<std::size_t> finished{0};
  std::vector<std::future<SeedWork>> futures;
  futures.reserve(n_seeds);
  for (Seed seed : config.seeds) {
    futures.push_back(std::async(std::launch::async, [&, seed] {
      SeedWork work = process_seed(config, doc, seed, *gateway);
      const std::size_t done = ++finished;
      emit("runs", done, n_seeds,
           "Run " + std::to_string(seed) + " " + std::string(to_string(work.result.status)));
      return work;
    }));
  }
  std::vector<SeedWork> work;
  work.reserve(n_seeds);
  for (auto& f : futures) work.push_back(f.get());
  if (options.clock) {
    for (SeedWork& w : work) w.result.provider_echo.erase("latency_ms");
  }

  auto failure_summary = [&] {
    std::string detail;
    for (const SeedWork& w : work) {
      if (!detail.empty()) detail += "; ";
      detail += std::to_string(w.result.seed) + " " + std::string(to_string(w.result.status));
      if (!w.result.chunks.empty() && !w.result.chunks.back().error.empty()) {
        detail += " (" + w.result.chunks.back().error + ")";
      }
    }
    return detail;
  };

  std::vector<json> all_parsed;
  for (const SeedWork& w : work) {
    if (w.result.status == RunStatus::ok) all_parsed.insert(all_parsed.end(), w.parsed.begin(), w.parsed.end());
  }
  if (all_parsed.empty()) throw AllRunsFailed(failure_summary());

  emit("schema", 0, 1, "Detecting theme fields");
  report.schema = detect_schema(all_parsed);

  for (SeedWork& w : work) {
    if (w.result.status != RunStatus::ok) continue;
    std::vector<ChunkThemes> per_chunk;
    for (std::size_t c = 0; c < w.parsed.size(); ++c) {
      per_chunk.emplace_back(c, extract_themes(w.parsed[c], *report.schema, w.result.seed, &w.result.diagnostics));
    }
    w.result.themes = synthesize_chunks(per_chunk, *embedder, config.sim_threshold, options.embedding_cap);
    if (w.result.themes.empty()) {
      w.result.status = RunStatus::parse_failed;
      w.result.diagnostics.push_back("no themes could be extracted");
    }
  }

  std::vector<Seed> ok_seeds;
  for (SeedWork& w : work) {
    if (w.result.status == RunStatus::ok) {
      ok_seeds.push_back(w.result.seed);
    } else {
      w.result.themes.clear();
      std::string why = w.result.chunks.empty() ? "" : w.result.chunks.back().error;
      if (why.empty() && !w.result.diagnostics.empty()) why = w.result.diagnostics.back();
      report.warnings.push_back("run " + std::to_string(w.result.seed) + " " +
                                std::string(to_string(w.result.status)) + ": " + why);
    }
    report.runs.push_back(w.result);
  }
  if (ok_seeds.empty()) throw AllRunsFailed(failure_summary());
  const std::size_t n_ok = ok_seeds.size();
  report.successful_runs = n_ok;

  std::vector<ThemeRecord> all_themes;
  std::vector<std::vector<std::size_t>> run_indices;
  for (const RunResult& r : report.runs) {
    if (r.status != RunStatus::ok) continue;
    run_indices.emplace_back();
    for (const ThemeRecord& t : r.themes) {
      run_indices.back().push_back(all_themes.size());
      all_themes.push_back(t);
    }
  }

  emit("clustering", 0, all_themes.size(), "Embedding and clustering " + std::to_string(all_themes.size()) + " themes");
  const ThemeScorer scorer(std::move(all_themes), *embedder, options.embedding_cap);
  report.classes = cluster_themes(scorer, config.sim_threshold);
  for (EquivalenceClass& cls : report.classes) cls = count_frequency(std::move(cls), n_ok, config.consensus_threshold);

  PresenceMatrix presence;
  presence.runs = ok_seeds;
  for (const EquivalenceClass& cls : report.classes) presence.classes.push_back(cls.id);
  for (Seed seed : ok_seeds) {
    std::vector<bool> row;
    for (const EquivalenceClass& cls : report.classes) {
      row.push_back(std::binary_search(cls.runs_covered.begin(), cls.runs_covered.end(), seed));
    }
    presence.cells.push_back(std::move(row));
  }
  report.presence = presence;

  if (n_ok >= 2) {
    ReliabilitySummary summary = kappa_matrix(presence);
    const std::size_t total = pair_count(n_ok);
    std::size_t done = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_ok; ++i) {
      for (std::size_t j = i + 1; j < n_ok; ++j) {
        emit("similarity", done, total,
             "Calculating similarity " + std::to_string(done + 1) + "/" + std::to_string(total) + "...");
        const double s = run_similarity(scorer, run_indices[i], run_indices[j], options.similarity_sample_cap);
        summary.pairwise_cosine.push_back({ok_seeds[i], ok_seeds[j], s});
        sum += s;
        ++done;
      }
    }
    emit("similarity", done, total, "Calculated " + std::to_string(total) + " similarities");
    summary.mean_cosine = sum / static_cast<double>(total);
    summary.cosine_band = cosine_band(summary.mean_cosine);
    report.reliability = std::move(summary);
  } else {
    report.warnings.push_back("fewer than two successful runs; reliability metrics omitted");
  }

  emit("consensus", 0, 1, "Filtering consensus themes");
  for (const EquivalenceClass& cls : consensus_filter(report.classes, n_ok, config.consensus_threshold)) {
    report.consensus.push_back(to_consensus_theme(cls, n_ok));
  }
  emit("done", 1, 1, "Analysis complete");
  return report;
}

AnalysisReport recompute_consensus(const AnalysisReport& report, double new_threshold) {
  if (!(new_threshold > 0.0 && new_threshold <= 1.0)) {
    throw InvalidThreshold("consensus threshold must lie in (0, 1]");
  }
  if (report.successful_runs == 0) throw InvalidArgument("report has no successful runs");
  AnalysisReport out = report;
  out.consensus_threshold = new_threshold;
  out.consensus.clear();
  for (EquivalenceClass& cls : out.classes) cls = count_frequency(std::move(cls), out.successful_runs, new_threshold);
  for (const EquivalenceClass& cls : consensus_filter(out.classes, out.successful_runs, new_threshold)) {
    out.consensus.push_back(to_consensus_theme(cls, out.successful_runs));
  }
  return out;
}

}  // namespace thematic
