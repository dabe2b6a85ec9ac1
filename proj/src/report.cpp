#include "thematic/report.hpp"

#include <cstdio>
#include <initializer_list>
#include <sstream>

namespace thematic {

using nlohmann::json;

namespace {

template <typename E>
E enum_from(std::string_view name, std::initializer_list<E> values, const char* what) {
  for (E v : values) {
    if (to_string(v) == name) return v;
  }
  throw InvalidArgument(std::string("unknown ") + what + ": " + std::string(name));
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json opt_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> opt_string(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

json theme_to_json(const ThemeRecord& t) {
  return {{"name", t.name},
          {"description", t.description},
          {"quotes", t.quotes},
          {"run_id", t.run_id},
          {"field_path", t.field_path}};
}

ThemeRecord theme_from_json(const json& j) {
  return {j.at("name").get<std::string>(), j.at("description").get<std::string>(),
          j.at("quotes").get<std::vector<std::string>>(), j.at("run_id").get<Seed>(),
          j.at("field_path").get<std::string>()};
}

json themes_to_json(const std::vector<ThemeRecord>& themes) {
  json out = json::array();
  for (const auto& t : themes) out.push_back(theme_to_json(t));
  return out;
}

std::vector<ThemeRecord> themes_from_json(const json& j) {
  std::vector<ThemeRecord> out;
  for (const auto& t : j) out.push_back(theme_from_json(t));
  return out;
}

json pairs_to_json(const std::vector<PairValue>& pairs) {
  json out = json::array();
  for (const auto& p : pairs) out.push_back({{"a", p.a}, {"b", p.b}, {"value", p.value}});
  return out;
}

std::vector<PairValue> pairs_from_json(const json& j) {
  std::vector<PairValue> out;
  for (const auto& p : j) out.push_back({p.at("a").get<Seed>(), p.at("b").get<Seed>(), p.at("value").get<double>()});
  return out;
}

json chunking_to_json(const ChunkingOptions& c) {
  return {{"max_chunk_chars", c.max_chunk_chars}, {"overlap_fraction", c.overlap_fraction}};
}

ChunkingOptions chunking_from_json(const json& j) {
  return {j.at("max_chunk_chars").get<std::size_t>(), j.at("overlap_fraction").get<double>()};
}

json run_to_json(const RunResult& r) {
  json chunks = json::array();
  for (const auto& c : r.chunks) {
    chunks.push_back({{"chunk_index", c.chunk_index},
                      {"raw_text", c.raw_text},
                      {"stage", c.stage ? json(std::string(to_string(*c.stage))) : json(nullptr)},
                      {"error", c.error},
                      {"attempts", c.attempts}});
  }
  return {{"seed", r.seed},
          {"status", std::string(to_string(r.status))},
          {"chunks", chunks},
          {"themes", themes_to_json(r.themes)},
          {"attempts", r.attempts},
          {"diagnostics", r.diagnostics},
          {"provider_echo", r.provider_echo}};
}

RunResult run_from_json(const json& j) {
  RunResult r;
  r.seed = j.at("seed").get<Seed>();
  r.status = enum_from(j.at("status").get<std::string>(),
                       {RunStatus::ok, RunStatus::parse_failed, RunStatus::api_failed}, "run status");
  for (const auto& c : j.at("chunks")) {
    ChunkOutcome o;
    o.chunk_index = c.at("chunk_index").get<std::size_t>();
    o.raw_text = c.at("raw_text").get<std::string>();
    if (!c.at("stage").is_null()) {
      o.stage = enum_from(c.at("stage").get<std::string>(),
                          {ExtractionStage::direct, ExtractionStage::fence_stripped, ExtractionStage::salvaged},
                          "extraction stage");
    }
    o.error = c.at("error").get<std::string>();
    o.attempts = c.at("attempts").get<int>();
    r.chunks.push_back(std::move(o));
  }
  r.themes = themes_from_json(j.at("themes"));
  r.attempts = j.at("attempts").get<int>();
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  r.provider_echo = j.at("provider_echo").get<std::map<std::string, std::string>>();
  return r;
}

json class_to_json(const EquivalenceClass& c) {
  return {{"id", c.id},
          {"members", themes_to_json(c.members)},
          {"representative", theme_to_json(c.representative)},
          {"runs_covered", c.runs_covered},
          {"frequency", c.frequency},
          {"consistency", c.consistency},
          {"tier", std::string(to_string(c.tier))},
          {"diameter", c.diameter}};
}

EquivalenceClass class_from_json(const json& j) {
  EquivalenceClass c;
  c.id = j.at("id").get<std::size_t>();
  c.members = themes_from_json(j.at("members"));
  c.representative = theme_from_json(j.at("representative"));
  c.runs_covered = j.at("runs_covered").get<std::vector<Seed>>();
  c.frequency = j.at("frequency").get<std::size_t>();
  c.consistency = j.at("consistency").get<double>();
  c.tier = confidence_tier_from_string(j.at("tier").get<std::string>());
  c.diameter = j.at("diameter").get<double>();
  return c;
}

json reliability_to_json(const ReliabilitySummary& s) {
  return {{"pairwise_kappa", pairs_to_json(s.pairwise_kappa)},
          {"mean_kappa", s.mean_kappa},
          {"min_kappa", s.min_kappa},
          {"max_kappa", s.max_kappa},
          {"kappa_range", s.kappa_range},
          {"pairwise_cosine", pairs_to_json(s.pairwise_cosine)},
          {"mean_cosine", s.mean_cosine},
          {"label", std::string(to_string(s.label))},
          {"stability", std::string(to_string(s.stability))},
          {"cosine_band", std::string(to_string(s.cosine_band))},
          {"diagnostics", s.diagnostics}};
}

ReliabilitySummary reliability_from_json(const json& j) {
  ReliabilitySummary s;
  s.pairwise_kappa = pairs_from_json(j.at("pairwise_kappa"));
  s.mean_kappa = j.at("mean_kappa").get<double>();
  s.min_kappa = j.at("min_kappa").get<double>();
  s.max_kappa = j.at("max_kappa").get<double>();
  s.kappa_range = j.at("kappa_range").get<double>();
  s.pairwise_cosine = pairs_from_json(j.at("pairwise_cosine"));
  s.mean_cosine = j.at("mean_cosine").get<double>();
  s.label = enum_from(j.at("label").get<std::string>(),
                      {AgreementLabel::poor, AgreementLabel::fair, AgreementLabel::moderate,
                       AgreementLabel::substantial, AgreementLabel::almost_perfect},
                      "agreement label");
  s.stability = enum_from(j.at("stability").get<std::string>(),
                          {StabilityBand::stable, StabilityBand::moderate_variation, StabilityBand::high_variation},
                          "stability band");
  s.cosine_band = enum_from(j.at("cosine_band").get<std::string>(),
                            {CosineBand::low, CosineBand::moderate, CosineBand::high}, "cosine band");
  s.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  return s;
}

json schema_to_json(const SchemaDescriptor& s) {
  json arrays = json::array();
  for (const auto& a : s.theme_arrays) {
    arrays.push_back({{"field_path", a.field_path},
                      {"name_key", opt_string(a.name_key)},
                      {"description_key", opt_string(a.description_key)},
                      {"quotes_key", opt_string(a.quotes_key)},
                      {"coverage", a.coverage}});
  }
  return {{"theme_arrays", arrays}};
}

SchemaDescriptor schema_from_json(const json& j) {
  SchemaDescriptor s;
  for (const auto& a : j.at("theme_arrays")) {
    s.theme_arrays.push_back({a.at("field_path").get<std::string>(), opt_string(a.at("name_key")),
                              opt_string(a.at("description_key")), opt_string(a.at("quotes_key")),
                              a.at("coverage").get<double>()});
  }
  return s;
}

const std::vector<PairValue>* matrix_pairs(const AnalysisReport& report, MatrixKind kind) {
  if (!report.reliability) return nullptr;
  return kind == MatrixKind::kappa ? &report.reliability->pairwise_kappa : &report.reliability->pairwise_cosine;
}

std::string markdown(const AnalysisReport& report) {
  std::ostringstream out;
  const std::size_t n = report.successful_runs;
  out << "# Thematic Analysis Report\n\n";
  out << "- Generated: " << report.created_at << "\n";
  out << "- Provider: " << report.config.provider_kind;
  if (!report.config.model.empty()) out << " (" << report.config.model << ")";
  out << "\n- Runs: " << n << "/" << report.runs.size() << " successful (seeds";
  for (const auto& r : report.runs) out << " " << r.seed;
  out << ")\n- Temperature: " << fixed(report.config.temperature, 1) << "\n";
  if (report.reliability) {
    const auto& rel = *report.reliability;
    out << "- Mean Cohen's κ: " << fixed(rel.mean_kappa, 3) << " (" << to_string(rel.label) << "), range "
        << fixed(rel.kappa_range, 3) << " [" << fixed(rel.min_kappa, 3) << ", " << fixed(rel.max_kappa, 3) << "] ("
        << to_string(rel.stability) << ")\n";
    out << "- Mean cosine similarity: " << fixed(100.0 * rel.mean_cosine, 1) << "% (" << to_string(rel.cosine_band)
        << ", mean over " << rel.pairwise_cosine.size() << " pairs)\n";
  } else {
    out << "- Cohen's κ: not available (fewer than two successful runs)\n";
  }
  out << "- Consensus threshold: " << fixed(100.0 * report.consensus_threshold, 1) << "%\n";
  out << "- Similarity threshold: " << fixed(report.config.sim_threshold, 2) << "\n";

  if (!report.warnings.empty()) {
    out << "\n## Warnings\n\n";
    for (const auto& w : report.warnings) out << "- " << w << "\n";
  }

  out << "\n## Consensus Themes\n";
  if (report.consensus.empty()) out << "\nNo theme reached the consensus threshold.\n";
  std::size_t rank = 0;
  for (const ConsensusTheme& t : report.consensus) {
    out << "\n### " << ++rank << ". " << t.name << " (" << fixed(t.consistency_pct, 1) << "%, " << t.frequency << "/"
        << t.n_runs << " runs)\n\n";
    out << "Confidence: " << to_string(t.tier) << "\n\n";
    if (!t.description.empty() && t.description != t.name) out << t.description << "\n\n";
    for (const auto& q : t.member_quotes) out << "> \"" << q << "\"\n";
  }
  return out.str();
}

}  // namespace

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "json") return ReportFormat::json;
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "csv" || name == "csv_matrices") return ReportFormat::csv_matrices;
  throw InvalidArgument("unknown report format: " + std::string(name));
}

std::string matrix_csv(const AnalysisReport& report, MatrixKind kind) {
  std::vector<Seed> seeds = report.presence ? report.presence->runs : std::vector<Seed>{};
  const std::vector<PairValue>* pairs = matrix_pairs(report, kind);
  auto lookup = [&](Seed a, Seed b) -> double {
    if (a == b) return 1.0;
    if (pairs) {
      for (const PairValue& p : *pairs) {
        if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) return p.value;
      }
    }
    return 0.0;
  };
  std::ostringstream out;
  out << (kind == MatrixKind::kappa ? "kappa" : "cosine");
  for (Seed s : seeds) out << "," << s;
  out << "\n";
  for (Seed a : seeds) {
    out << a;
    for (Seed b : seeds) out << "," << fixed(lookup(a, b), 3);
    out << "\n";
  }
  return out.str();
}

std::string generate_report(const AnalysisReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return report_to_json(report).dump(2) + "\n";
    case ReportFormat::markdown: return markdown(report);
    case ReportFormat::csv_matrices:
      return matrix_csv(report, MatrixKind::cosine) + "\n" + matrix_csv(report, MatrixKind::kappa);
  }
  throw InvalidArgument("unknown report format");
}

json consensus_to_json(const std::vector<ConsensusTheme>& consensus) {
  json out = json::array();
  for (const auto& t : consensus) {
    out.push_back({{"class_id", t.class_id},
                   {"name", t.name},
                   {"description", t.description},
                   {"consistency_pct", t.consistency_pct},
                   {"frequency", t.frequency},
                   {"n_runs", t.n_runs},
                   {"tier", std::string(to_string(t.tier))},
                   {"member_quotes", t.member_quotes}});
  }
  return out;
}

std::vector<ConsensusTheme> consensus_from_json(const json& doc) {
  std::vector<ConsensusTheme> out;
  for (const auto& t : doc) {
    out.push_back({t.at("class_id").get<std::size_t>(), t.at("name").get<std::string>(),
                   t.at("description").get<std::string>(), t.at("consistency_pct").get<double>(),
                   t.at("frequency").get<std::size_t>(), t.at("n_runs").get<std::size_t>(),
                   confidence_tier_from_string(t.at("tier").get<std::string>()),
                   t.at("member_quotes").get<std::vector<std::string>>()});
  }
  return out;
}

json report_to_json(const AnalysisReport& report) {
  const ConfigEcho& c = report.config;
  json config = {{"seeds", c.seeds},
                 {"temperature", c.temperature},
                 {"prompt", c.prompt},
                 {"provider_kind", c.provider_kind},
                 {"provider_endpoint", c.provider_endpoint},
                 {"model", c.model},
                 {"api_key_supplied", c.api_key_supplied},
                 {"sim_threshold", c.sim_threshold},
                 {"consensus_threshold", c.consensus_threshold},
                 {"chunking", chunking_to_json(c.chunking)},
                 {"mode", c.mode},
                 {"embedding_backend", c.embedding_backend}};
  const DocumentSummary& d = report.document;
  json document = {{"char_count", d.char_count},
                   {"line_count", d.line_count},
                   {"chunk_count", d.chunk_count},
                   {"invalid_sequences", d.invalid_sequences},
                   {"speakers", d.speakers},
                   {"timestamp_count", d.timestamp_count}};
  json runs = json::array();
  for (const auto& r : report.runs) runs.push_back(run_to_json(r));
  json classes = json::array();
  for (const auto& cls : report.classes) classes.push_back(class_to_json(cls));
  json presence = nullptr;
  if (report.presence) {
    presence = {{"runs", report.presence->runs},
                {"classes", report.presence->classes},
                {"cells", report.presence->cells}};
  }
  return {{"format_version", report.format_version},
          {"created_at", report.created_at},
          {"config", config},
          {"document", document},
          {"runs", runs},
          {"successful_runs", report.successful_runs},
          {"schema", report.schema ? schema_to_json(*report.schema) : json(nullptr)},
          {"classes", classes},
          {"presence", presence},
          {"reliability", report.reliability ? reliability_to_json(*report.reliability) : json(nullptr)},
          {"consensus_threshold", report.consensus_threshold},
          {"consensus", consensus_to_json(report.consensus)},
          {"warnings", report.warnings}};
}

AnalysisReport report_from_json(const json& doc) {
  try {
    AnalysisReport r;
    r.format_version = doc.at("format_version").get<int>();
    if (r.format_version != kReportFormatVersion) {
      throw InvalidArgument("unsupported report format version " + std::to_string(r.format_version));
    }
    r.created_at = doc.at("created_at").get<std::string>();
    const json& c = doc.at("config");
    r.config.seeds = c.at("seeds").get<std::vector<Seed>>();
    r.config.temperature = c.at("temperature").get<double>();
    r.config.prompt = c.at("prompt").get<std::string>();
    r.config.provider_kind = c.at("provider_kind").get<std::string>();
    r.config.provider_endpoint = c.at("provider_endpoint").get<std::string>();
    r.config.model = c.at("model").get<std::string>();
    r.config.api_key_supplied = c.at("api_key_supplied").get<bool>();
    r.config.sim_threshold = c.at("sim_threshold").get<double>();
    r.config.consensus_threshold = c.at("consensus_threshold").get<double>();
    r.config.chunking = chunking_from_json(c.at("chunking"));
    r.config.mode = c.at("mode").get<std::string>();
    r.config.embedding_backend = c.at("embedding_backend").get<std::string>();
    const json& d = doc.at("document");
    r.document = {d.at("char_count").get<std::size_t>(),
                  d.at("line_count").get<std::size_t>(),
                  d.at("chunk_count").get<std::size_t>(),
                  d.at("invalid_sequences").get<std::size_t>(),
                  d.at("speakers").get<std::vector<std::string>>(),
                  d.at("timestamp_count").get<std::size_t>()};
    for (const auto& run : doc.at("runs")) r.runs.push_back(run_from_json(run));
    r.successful_runs = doc.at("successful_runs").get<std::size_t>();
    if (!doc.at("schema").is_null()) r.schema = schema_from_json(doc.at("schema"));
    for (const auto& cls : doc.at("classes")) r.classes.push_back(class_from_json(cls));
    if (const json& p = doc.at("presence"); !p.is_null()) {
      r.presence = PresenceMatrix{p.at("runs").get<std::vector<Seed>>(),
                                  p.at("classes").get<std::vector<std::size_t>>(),
                                  p.at("cells").get<std::vector<std::vector<bool>>>()};
    }
    if (!doc.at("reliability").is_null()) r.reliability = reliability_from_json(doc.at("reliability"));
    r.consensus_threshold = doc.at("consensus_threshold").get<double>();
    r.consensus = consensus_from_json(doc.at("consensus"));
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed report: ") + e.what());
  }
}

AnalysisReport parse_report(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw InvalidArgument("report is not valid JSON");
  return report_from_json(doc);
}

}  // namespace thematic
