#include <doctest.h>

#include <set>
#include <sstream>

#include "thematic/config.hpp"
#include "thematic/orchestrator.hpp"
#include "thematic/report.hpp"
#include "thematic/service.hpp"

using namespace thematic;
using nlohmann::json;

namespace {

const char* kTranscript =
    "[00:01] Interviewer: How are you?\n"
    "[00:04] Participant: Tired. I worry about money and feel alone since the move.\n";

MockScenario four_themes() {
  MockScenario s;
  s.themes = {
      {"Fear of isolation", "Worry about losing contact with friends and family", {"nobody calls"}, 1.0,
       MockTheme::Category::theme},
      {"Financial strain", "Stress about rent, debt and monthly bills", {"bills"}, 1.0, MockTheme::Category::theme},
      {"Hope for recovery", "Optimism that therapy and routine will help", {"lighter"}, 1.0,
       MockTheme::Category::pattern},
      {"Self-blame", "Attributing setbacks to personal weakness", {"my fault"}, 1.0, MockTheme::Category::pattern},
  };
  s.wrapper = WrapperStyle::fenced;
  return s;
}

AnalysisConfig mock_config(MockScenario s) {
  AnalysisConfig c;
  c.provider = mock_provider(std::move(s));
  return c;
}

RunOptions fixed_options() {
  RunOptions o;
  o.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
  o.gateway = std::make_shared<Gateway>(make_http_transport(), RetryPolicy{}, [](auto) {});
  return o;
}

AnalysisReport run(const AnalysisConfig& c, const std::string& text = kTranscript) {
  return run_ensemble(c, prepare_transcript(text), fixed_options());
}

}  // namespace

TEST_CASE("configuration validation") {
  AnalysisConfig c = mock_config(four_themes());
  CHECK_NOTHROW(c.validate());
  CHECK(c.seeds == std::vector<Seed>{42, 123, 456, 789, 1011, 1213});

  auto expect_invalid = [](AnalysisConfig bad) { CHECK_THROWS_AS(bad.validate(), InvalidArgument); };
  AnalysisConfig bad = c;
  bad.seeds = {1, 2, 3, 4, 5, 6, 7};
  expect_invalid(bad);
  bad = c;
  bad.seeds = {};
  expect_invalid(bad);
  bad = c;
  bad.seeds = {5, 5};
  expect_invalid(bad);
  bad = c;
  bad.temperature = 2.1;
  expect_invalid(bad);
  bad = c;
  bad.sim_threshold = 1.0;
  expect_invalid(bad);
  bad = c;
  bad.consensus_threshold = 0.0;
  expect_invalid(bad);
  bad = c;
  bad.chunking.max_chunk_chars = 100;
  expect_invalid(bad);
  bad = c;
  bad.provider.scenario.reset();
  expect_invalid(bad);
}

TEST_CASE("zero-noise ensemble") {
  const AnalysisReport r = run(mock_config(four_themes()));
  CHECK(r.successful_runs == 6);
  REQUIRE(r.reliability);
  CHECK(r.reliability->pairwise_kappa.size() == 15);
  for (const auto& p : r.reliability->pairwise_kappa) CHECK(p.value == 1.0);
  CHECK(r.reliability->mean_cosine >= 0.999);
  CHECK(r.reliability->label == AgreementLabel::almost_perfect);
  REQUIRE(r.consensus.size() == 4);
  for (const auto& t : r.consensus) {
    CHECK(t.consistency_pct == 100.0);
    CHECK(t.tier == ConfidenceTier::high);
    CHECK(t.n_runs == 6);
  }
  CHECK(r.warnings.empty());
  CHECK(r.document.speakers == std::vector<std::string>{"Interviewer", "Participant"});
  CHECK(r.document.timestamp_count == 2);
  for (const auto& run : r.runs) {
    CHECK(run.status == RunStatus::ok);
    CHECK(run.themes.size() == 4);
    REQUIRE(run.chunks.size() == 1);
    CHECK(run.chunks[0].stage == ExtractionStage::fence_stripped);
  }
  CHECK(generate_report(r, ReportFormat::json) == generate_report(run(mock_config(four_themes())), ReportFormat::json));
}

TEST_CASE("progress events") {
  std::vector<ProgressEvent> events;
  RunOptions o = fixed_options();
  o.on_progress = [&](const ProgressEvent& e) { events.push_back(e); };
  run_ensemble(mock_config(four_themes()), prepare_transcript(kTranscript), o);
  std::size_t last = 0;
  int similarity = 0;
  for (const auto& e : events) {
    if (e.stage != "similarity") continue;
    CHECK(e.current >= last);
    CHECK(e.total == 15);
    last = e.current;
    if (e.message.starts_with("Calculating similarity")) ++similarity;
  }
  CHECK(similarity == 15);
  CHECK(events.back().stage == "done");
}

TEST_CASE("one seed failing permanently") {
  MockScenario s = four_themes();
  s.failures[789] = {MockFailureKind::server_error, 0};
  const AnalysisReport r = run(mock_config(s));
  CHECK(r.runs.size() == 6);
  CHECK(r.runs[3].status == RunStatus::api_failed);
  CHECK(r.runs[3].attempts == 3);
  CHECK(r.runs[3].themes.empty());
  CHECK(r.successful_runs == 5);
  REQUIRE(r.reliability);
  CHECK(r.reliability->pairwise_kappa.size() == 10);
  CHECK(r.reliability->pairwise_cosine.size() == 10);
  REQUIRE(r.presence);
  CHECK(r.presence->runs == std::vector<Seed>{42, 123, 456, 1011, 1213});
  for (const auto& t : r.consensus) CHECK(t.n_runs == 5);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings[0].find("789") != std::string::npos);

  const AnalysisReport healthy = run(mock_config(four_themes()));
  for (std::size_t i : {0, 1, 2, 4, 5}) CHECK(r.runs[i].themes == healthy.runs[i].themes);
}

TEST_CASE("a recovering seed still succeeds") {
  MockScenario s = four_themes();
  s.failures[42] = {MockFailureKind::rate_limit, 2};
  const AnalysisReport r = run(mock_config(s));
  CHECK(r.successful_runs == 6);
  CHECK(r.runs[0].attempts == 3);
}

TEST_CASE("parse failures are contained") {
  MockScenario s = four_themes();
  s.schema = SchemaShape::custom;
  AnalysisConfig c = mock_config(s);
  const AnalysisReport custom = [&] {
    AnalysisConfig cc = c;
    cc.mode = SchemaMode::custom;
    return run(cc);
  }();
  CHECK(custom.successful_runs == 6);
  REQUIRE(custom.schema);
  CHECK(custom.schema->theme_arrays[0].field_path == "core_themes");

  CHECK_THROWS_AS(run(c), AllRunsFailed);
}

TEST_CASE("fewer than two successful runs") {
  AnalysisConfig c = mock_config(four_themes());
  c.seeds = {42};
  const AnalysisReport r = run(c);
  CHECK_FALSE(r.reliability);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.consensus.size() == 4);
  CHECK(generate_report(r, ReportFormat::markdown).find("not available") != std::string::npos);

  MockScenario all_fail = four_themes();
  for (Seed s : default_seeds()) all_fail.failures[s] = {MockFailureKind::auth, 0};
  CHECK_THROWS_AS(run(mock_config(all_fail)), AllRunsFailed);
}

TEST_CASE("report formats") {
  const AnalysisReport r = run(mock_config(four_themes()));

  const std::string text = generate_report(r, ReportFormat::json);
  CHECK(parse_report(text) == r);
  CHECK(generate_report(parse_report(text), ReportFormat::json) == text);

  const std::string md = generate_report(r, ReportFormat::markdown);
  CHECK(md.find("κ") != std::string::npos);
  CHECK(md.find("(100.0%, 6/6 runs)") != std::string::npos);

  const std::string csv = matrix_csv(r, MatrixKind::cosine);
  std::istringstream lines(csv);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
  CHECK(rows == 7);
  CHECK(csv.find("42,1.000,") != std::string::npos);
  CHECK(generate_report(r, ReportFormat::csv_matrices).find("kappa,42,123") != std::string::npos);

  CHECK_THROWS_AS(parse_report("{}"), InvalidArgument);
  CHECK_THROWS_AS(parse_report("nope"), InvalidArgument);
  CHECK(report_format_from_string("csv") == ReportFormat::csv_matrices);
}

TEST_CASE("api keys never reach reports") {
  AnalysisConfig c = mock_config(four_themes());
  c.provider.api_key = "sk-live-SECRET-abcdef";
  const AnalysisReport r = run(c);
  CHECK(r.config.api_key_supplied);
  for (auto format : {ReportFormat::json, ReportFormat::markdown, ReportFormat::csv_matrices}) {
    CHECK(generate_report(r, format).find("SECRET") == std::string::npos);
  }
}

TEST_CASE("recomputing consensus") {
  MockScenario s = four_themes();
  s.themes[1].inclusion = 0.55;
  s.themes[3].inclusion = 0.3;
  const AnalysisReport r = run(mock_config(s));
  std::size_t previous = r.classes.size() + 1;
  for (int step = 2; step <= 20; ++step) {
    const auto re = recompute_consensus(r, step / 20.0);
    CHECK(re.consensus.size() <= previous);
    previous = re.consensus.size();
    CHECK(re.classes.size() == r.classes.size());
  }
  const auto back = recompute_consensus(recompute_consensus(r, 0.9), r.consensus_threshold);
  CHECK(back.consensus == r.consensus);
  CHECK_THROWS_AS(recompute_consensus(r, 0.0), InvalidThreshold);
  CHECK_THROWS_AS(recompute_consensus(r, 1.01), InvalidThreshold);
}

TEST_CASE("multi-chunk documents are synthesized per run") {
  std::string text;
  for (int i = 0; i < 60; ++i) text += "Participant: I keep worrying about money and the rent every single month.\n";
  AnalysisConfig c = mock_config(four_themes());
  c.chunking.max_chunk_chars = 1000;
  const AnalysisReport r = run(c, text);
  CHECK(r.document.chunk_count > 1);
  for (const auto& run : r.runs) {
    CHECK(run.chunks.size() == r.document.chunk_count);
    CHECK(run.themes.size() == 4);
  }
  CHECK(r.consensus.size() == 4);
}

TEST_CASE("chunk synthesis unions quotes") {
  ThemeRecord a{"Money worries", "Money worries", {"q1", "q2"}, 1, "core_themes"};
  ThemeRecord b{"money WORRIES", "money WORRIES", {"q2", "q3"}, 1, "core_themes"};
  ThemeRecord c{"Sleep", "Sleep", {"z"}, 1, "core_themes"};
  const std::vector<ChunkThemes> chunks = {{0, {a, c}}, {1, {b}}};
  const auto merged = synthesize_chunks(chunks, *reference_embedder());
  REQUIRE(merged.size() == 2);
  const auto& money = merged[0].name == "Sleep" ? merged[1] : merged[0];
  CHECK(std::set<std::string>(money.quotes.begin(), money.quotes.end()) == std::set<std::string>{"q1", "q2", "q3"});
  CHECK(money.quotes.size() == 3);
  const std::vector<ChunkThemes> single = {{0, {a, c}}};
  CHECK(synthesize_chunks(single, *reference_embedder()) == std::vector<ThemeRecord>{a, c});
}

TEST_CASE("cross-model comparison") {
  MockScenario other = four_themes();
  other.salt = 17;
  other.noise = 0.2;
  const AnalysisReport a = run(mock_config(four_themes()));
  const AnalysisReport b = run(mock_config(other));
  const auto matches = cross_model_compare(a, b, *reference_embedder());
  CHECK(matches.size() == a.consensus.size() * b.consensus.size());
  int invariant = 0;
  for (const auto& m : matches) invariant += m.model_invariant;
  CHECK(invariant >= 3);
}

TEST_CASE("config documents") {
  const json doc = {{"provider", "mock"},
                    {"seeds", {1, 2, 3}},
                    {"temperature", 0.3},
                    {"mode", "custom"},
                    {"consensus_threshold", 0.67},
                    {"prompt", "Seed {seed}: {text}"},
                    {"scenario", scenario_to_json(four_themes())}};
  const AnalysisConfig c = config_from_json(doc);
  CHECK(c.seeds == std::vector<Seed>{1, 2, 3});
  CHECK(c.temperature == 0.3);
  CHECK(c.mode == SchemaMode::custom);
  CHECK(c.prompt.text_var == TextVar::text);
  REQUIRE(c.provider.scenario);
  CHECK(*c.provider.scenario == four_themes());
  CHECK_THROWS_AS(config_from_json({{"bogus", 1}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"prompt", "no placeholder"}}), MissingTextPlaceholder);
  CHECK(parse_seed_list("42, 123,456") == std::vector<Seed>{42, 123, 456});
  CHECK_THROWS_AS(parse_seed_list("1,,2"), InvalidArgument);
  CHECK_THROWS_AS(parse_seed_list("-4"), InvalidArgument);

  MockScenario failing = four_themes();
  failing.failures[5] = {MockFailureKind::timeout, 1};
  CHECK(scenario_from_json(scenario_to_json(failing)) == failing);
}

TEST_CASE("HTTP API routing") {
  AnalysisService service(fixed_options());
  json body = {{"provider", "mock"}, {"scenario", scenario_to_json(four_themes())}, {"document", kTranscript}};

  auto created = handle_api(service, "POST", "/api/analyses", body.dump());
  REQUIRE(created.status == 202);
  const std::string id = json::parse(created.body)["id"];
  service.wait(id);

  const json status = json::parse(handle_api(service, "GET", "/api/analyses/" + id, "").body);
  CHECK(status["status"] == "done");
  CHECK_FALSE(status["events"].empty());

  const auto report = handle_api(service, "GET", "/api/analyses/" + id + "/report", "");
  CHECK(report.status == 200);
  const AnalysisReport parsed = report_from_json(json::parse(report.body));
  CHECK(parsed.consensus.size() == 4);

  const auto filtered = handle_api(service, "POST", "/api/analyses/" + id + "/consensus", R"({"threshold": 0.67})");
  CHECK(filtered.status == 200);
  CHECK(consensus_from_json(json::parse(filtered.body)) == recompute_consensus(parsed, 0.67).consensus);

  CHECK(handle_api(service, "POST", "/api/analyses/" + id + "/consensus", R"({"threshold": 3})").status == 400);
  CHECK(handle_api(service, "GET", "/api/analyses/999", "").status == 404);
  CHECK(handle_api(service, "GET", "/api/nothing", "").status == 404);
  CHECK(handle_api(service, "POST", "/api/analyses", "{").status == 400);
  body["seeds"] = {1, 2, 3, 4, 5, 6, 7};
  CHECK(handle_api(service, "POST", "/api/analyses", body.dump()).status == 400);

  const json providers = json::parse(handle_api(service, "GET", "/api/providers", "").body);
  CHECK(providers.size() == 5);
  CHECK(providers[0]["api_key_env"] == "OPENAI_API_KEY");
}

TEST_CASE("failed jobs report their error") {
  AnalysisService service(fixed_options());
  MockScenario s = four_themes();
  for (Seed seed : default_seeds()) s.failures[seed] = {MockFailureKind::auth, 0};
  const json body = {{"provider", "mock"}, {"scenario", scenario_to_json(s)}, {"document", kTranscript}};
  const std::string id = json::parse(handle_api(service, "POST", "/api/analyses", body.dump()).body)["id"];
  service.wait(id);
  const json status = json::parse(handle_api(service, "GET", "/api/analyses/" + id, "").body);
  CHECK(status["status"] == "failed");
  CHECK(handle_api(service, "GET", "/api/analyses/" + id + "/report", "").status == 400);
}
