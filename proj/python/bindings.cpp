#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thematic/config.hpp"
#include "thematic/embedding.hpp"
#include "thematic/json_extract.hpp"
#include "thematic/orchestrator.hpp"
#include "thematic/report.hpp"
#include "thematic/simulate.hpp"

namespace py = pybind11;
using namespace thematic;
using nlohmann::json;

namespace {

// Structured values cross the boundary as JSON text; the Python package
// decodes them.
std::string analyze(const std::string& document, const std::string& config_json,
                    const std::optional<std::string>& fixed_clock) {
  json doc = json::parse(config_json);
  AnalysisConfig config = config_from_json(doc);
  apply_env_api_key(config.provider);
  RunOptions options;
  if (fixed_clock) options.clock = [clock = *fixed_clock] { return clock; };
  TranscriptDocument transcript = prepare_transcript(document);
  AnalysisReport report;
  {
    py::gil_scoped_release release;
    report = run_ensemble(config, transcript, options);
  }
  return report_to_json(report).dump();
}

}  // namespace

PYBIND11_MODULE(_thematic, m) {
  m.doc() = "Multi-run LLM thematic analysis core";

  static py::exception<Error> base(m, "ThematicError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, e.what());
    } catch (const json::exception& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def("pair_count", &pair_count, py::arg("n"));
  m.def("cohen_kappa", [](const std::vector<bool>& a, const std::vector<bool>& b) { return cohen_kappa(a, b); },
        py::arg("a"), py::arg("b"));
  m.def("landis_koch", [](double k) { return std::string(to_string(landis_koch(k))); }, py::arg("kappa"));
  m.def("stability_band", [](double r) { return std::string(to_string(stability_band(r))); }, py::arg("kappa_range"));
  m.def("cosine_band", [](double c) { return std::string(to_string(cosine_band(c))); }, py::arg("mean_cosine"));
  m.def("consistency_pct", &consistency_pct, py::arg("frequency"), py::arg("n_runs"));

  m.def(
      "text_similarity",
      [](const std::string& a, const std::string& b) {
        const std::vector<std::string> texts{a, b};
        const auto v = embed(*reference_embedder(), texts);
        return cosine(v[0], v[1]);
      },
      py::arg("a"), py::arg("b"), "Cosine similarity of two texts under the reference embedder.");

  m.def(
      "extract_json",
      [](const std::string& raw, const std::string& mode) {
        ExtractionOutcome out = extract_json(raw, schema_mode_from_string(mode));
        return py::make_tuple(out.value.dump(), std::string(to_string(out.stage)), out.diagnostics);
      },
      py::arg("raw"), py::arg("mode") = "custom");

  m.def(
      "validate_prompt",
      [](const std::string& body) {
        PromptTemplate t = validate_template(body);
        return py::make_tuple(t.text_var == TextVar::text_chunk ? "text_chunk" : "text", t.has_seed_var, t.warnings);
      },
      py::arg("body"));

  m.def("analyze", &analyze, py::arg("document"), py::arg("config_json"), py::arg("fixed_clock") = py::none());

  m.def(
      "recompute_consensus",
      [](const std::string& report_json, double threshold) {
        return consensus_to_json(recompute_consensus(parse_report(report_json), threshold).consensus).dump();
      },
      py::arg("report_json"), py::arg("threshold"));

  m.def(
      "generate_report",
      [](const std::string& report_json, const std::string& format) {
        return generate_report(parse_report(report_json), report_format_from_string(format));
      },
      py::arg("report_json"), py::arg("format") = "markdown");

  m.def(
      "simulate",
      [](const std::string& scenario_json, std::size_t trials) {
        SimulationOptions options;
        options.trials = trials;
        const MockScenario scenario = scenario_from_json(json::parse(scenario_json));
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = simulate_se_ratio(scenario, options);
        }
        py::dict out;
        out["trials"] = r.trials;
        out["se_small"] = r.se_small;
        out["se_large"] = r.se_large;
        out["ratio"] = r.ratio;
        out["expected_ratio"] = r.expected_ratio;
        out["per_run_mean"] = r.per_run_mean;
        return out;
      },
      py::arg("scenario_json"), py::arg("trials") = 10000);
}
