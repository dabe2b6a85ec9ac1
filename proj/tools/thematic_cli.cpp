#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>

#include "thematic/config.hpp"
#include "thematic/orchestrator.hpp"
#include "thematic/report.hpp"
#include "thematic/service.hpp"
#include "thematic/simulate.hpp"

using namespace thematic;

namespace {

std::string read_source(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  return read_file(path);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << content;
}

struct AnalyzeArgs {
  std::string input;
  std::string config_file;
  std::string provider;
  std::string model;
  std::string endpoint;
  std::string seeds;
  std::optional<double> temperature;
  std::string prompt;
  std::string mode;
  std::optional<double> sim_threshold;
  std::optional<double> consensus_threshold;
  std::optional<std::size_t> max_chunk_chars;
  std::optional<double> overlap;
  std::optional<long> timeout_ms;
  std::string scenario;
  std::string embedding = "reference";
  std::string out;
  std::string format = "json";
  std::string fixed_clock;
  bool quiet = false;
};

int run_analyze(const AnalyzeArgs& a) {
  AnalysisConfig config;
  if (!a.config_file.empty()) config = load_config(a.config_file);
  if (!a.provider.empty()) config.provider.kind = provider_kind_from_string(a.provider);
  if (!a.model.empty()) config.provider.model = a.model;
  if (!a.endpoint.empty()) config.provider.endpoint = a.endpoint;
  if (a.timeout_ms) config.provider.timeout = std::chrono::milliseconds(*a.timeout_ms);
  if (!a.seeds.empty()) config.seeds = parse_seed_list(a.seeds);
  if (a.temperature) config.temperature = *a.temperature;
  if (!a.prompt.empty()) {
    PromptTemplate tmpl = validate_template(read_source(a.prompt));
    for (const auto& w : tmpl.warnings) std::cerr << "prompt warning: " << w << "\n";
    config.prompt = std::move(tmpl);
  }
  if (!a.mode.empty()) config.mode = schema_mode_from_string(a.mode);
  if (a.sim_threshold) config.sim_threshold = *a.sim_threshold;
  if (a.consensus_threshold) config.consensus_threshold = *a.consensus_threshold;
  if (a.max_chunk_chars) config.chunking.max_chunk_chars = *a.max_chunk_chars;
  if (a.overlap) config.chunking.overlap_fraction = *a.overlap;
  if (!a.scenario.empty()) config.provider.scenario = std::make_shared<const MockScenario>(load_scenario(a.scenario));
  apply_env_api_key(config.provider);
  const ReportFormat format = report_format_from_string(a.format);

  RunOptions options;
  options.embedder = make_embedding_backend(a.embedding);
  if (!a.fixed_clock.empty()) options.clock = [clock = a.fixed_clock] { return clock; };
  if (!a.quiet) {
    options.on_progress = [](const ProgressEvent& e) { std::cerr << "[" << e.stage << "] " << e.message << "\n"; };
  }
  const AnalysisReport report = run_ensemble(config, load_transcript(a.input), options);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  write_output(a.out, generate_report(report, format));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-run LLM thematic analysis with reliability metrics"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* cmd_analyze = app.add_subcommand("analyze", "Run a seeded ensemble over a transcript");
  cmd_analyze->add_option("--input", analyze.input, "Transcript file (UTF-8 text)")->required();
  cmd_analyze->add_option("--config", analyze.config_file, "JSON config file with defaults");
  cmd_analyze->add_option("--provider", analyze.provider, "openai, gemini, anthropic, openrouter or mock");
  cmd_analyze->add_option("--model", analyze.model, "Model name");
  cmd_analyze->add_option("--endpoint", analyze.endpoint, "Provider base URL");
  cmd_analyze->add_option("--timeout-ms", analyze.timeout_ms, "Per-request timeout");
  cmd_analyze->add_option("--seeds", analyze.seeds, "Comma-separated seeds (1-6)");
  cmd_analyze->add_option("--temperature", analyze.temperature, "Sampling temperature (0.0-2.0)");
  cmd_analyze->add_option("--prompt", analyze.prompt, "Prompt template file, or - for stdin");
  cmd_analyze->add_option("--mode", analyze.mode, "default or custom");
  cmd_analyze->add_option("--sim-threshold", analyze.sim_threshold, "Clustering similarity threshold");
  cmd_analyze->add_option("--consensus-threshold", analyze.consensus_threshold, "Minimum run fraction");
  cmd_analyze->add_option("--max-chunk-chars", analyze.max_chunk_chars, "Chunk size in characters");
  cmd_analyze->add_option("--overlap", analyze.overlap, "Chunk overlap fraction (0-0.5)");
  cmd_analyze->add_option("--scenario", analyze.scenario, "Mock provider scenario file");
  cmd_analyze->add_option("--embedding", analyze.embedding, "reference, or an embeddings endpoint URL");
  cmd_analyze->add_option("--out", analyze.out, "Output file (default stdout)");
  cmd_analyze->add_option("--format", analyze.format, "json, markdown or csv")
      ->check(CLI::IsMember({"json", "markdown", "md", "csv"}));
  cmd_analyze->add_option("--fixed-clock", analyze.fixed_clock, "Timestamp to stamp instead of the current time");
  cmd_analyze->add_flag("--quiet", analyze.quiet, "Suppress progress output");

  std::string consensus_report;
  double consensus_threshold = kDefaultConsensusThreshold;
  std::string consensus_format = "json";
  auto* cmd_consensus = app.add_subcommand("consensus", "Re-filter a stored report at a new threshold");
  cmd_consensus->add_option("--report", consensus_report, "Report JSON file")->required();
  cmd_consensus->add_option("--threshold", consensus_threshold, "Minimum run fraction")->required();
  cmd_consensus->add_option("--format", consensus_format, "json (consensus array) or markdown")
      ->check(CLI::IsMember({"json", "markdown", "md"}));

  std::string prompt_file;
  auto* cmd_validate = app.add_subcommand("validate-prompt", "Check a prompt template's placeholders");
  cmd_validate->add_option("--prompt", prompt_file, "Template file, or - for stdin")->required();

  std::string scenario_file;
  SimulationOptions sim;
  auto* cmd_simulate = app.add_subcommand("simulate", "Standard-error ratio experiment on the mock provider");
  cmd_simulate->add_option("--scenario", scenario_file, "Mock scenario file")->required();
  cmd_simulate->add_option("--trials", sim.trials, "Number of regenerated ensembles")->check(CLI::Range(2, 100000000));
  cmd_simulate->add_option("--small", sim.runs_small, "Runs in the small ensemble");
  cmd_simulate->add_option("--large", sim.runs_large, "Runs in the large ensemble");
  cmd_simulate->add_option("--base-seed", sim.base_seed, "First seed");

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  auto* cmd_serve = app.add_subcommand("serve", "HTTP API and static UI hosting");
  cmd_serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  cmd_serve->add_option("--host", host, "Bind address");
  cmd_serve->add_option("--static", static_dir, "Directory served at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_analyze) return run_analyze(analyze);
    if (*cmd_consensus) {
      const AnalysisReport report = recompute_consensus(parse_report(read_file(consensus_report)), consensus_threshold);
      if (consensus_format == "json") {
        std::cout << consensus_to_json(report.consensus).dump(2) << "\n";
      } else {
        std::cout << generate_report(report, ReportFormat::markdown);
      }
      return 0;
    }
    if (*cmd_validate) {
      try {
        const PromptTemplate tmpl = validate_template(read_source(prompt_file));
        for (const auto& w : tmpl.warnings) std::cout << "warning: " << w << "\n";
        std::cout << "ok: text placeholder " << (tmpl.text_var == TextVar::text_chunk ? "{text_chunk}" : "{text}")
                  << ", seed placeholder " << (tmpl.has_seed_var ? "present" : "absent") << "\n";
        return 0;
      } catch (const MissingTextPlaceholder& e) {
        std::cout << "invalid: " << e.what() << "\n";
        return 1;
      }
    }
    if (*cmd_simulate) {
      std::cout << format_simulation_table(simulate_se_ratio(load_scenario(scenario_file), sim));
      return 0;
    }
    if (*cmd_serve) {
      AnalysisService service;
      std::optional<std::filesystem::path> dir;
      if (!static_dir.empty()) dir = static_dir;
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!serve(service, host, port, dir)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
