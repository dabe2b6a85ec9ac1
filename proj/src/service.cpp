#include "thematic/service.hpp"

#include <regex>

#include "thematic/config.hpp"
#include "thematic/report.hpp"

namespace thematic {

using nlohmann::json;

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "unknown";
}

struct AnalysisService::Job {
  std::string id;
  mutable std::mutex mutex;
  JobState state = JobState::running;
  std::vector<ProgressEvent> events;
  std::string error;
  std::optional<AnalysisReport> report;
  std::shared_future<void> finished;
};

AnalysisService::AnalysisService(RunOptions defaults) : defaults_(std::move(defaults)) {}

AnalysisService::~AnalysisService() {
  std::lock_guard lock(mutex_);
  for (auto& [id, job] : jobs_) {
    if (job->finished.valid()) job->finished.wait();
  }
}

std::string AnalysisService::submit(AnalysisConfig config, std::string document_text) {
  config.validate();
  TranscriptDocument doc = prepare_transcript(document_text);
  auto job = std::make_shared<Job>();
  {
    std::lock_guard lock(mutex_);
    job->id = std::to_string(next_id_++);
    jobs_[job->id] = job;
  }
  RunOptions options = defaults_;
  options.on_progress = [job](const ProgressEvent& e) {
    std::lock_guard lock(job->mutex);
    job->events.push_back(e);
  };
  job->finished = std::async(std::launch::async, [job, config = std::move(config), doc = std::move(doc),
                                                  options = std::move(options)] {
                    try {
                      AnalysisReport report = run_ensemble(config, doc, options);
                      std::lock_guard lock(job->mutex);
                      job->report = std::move(report);
                      job->state = JobState::done;
                    } catch (const std::exception& e) {
                      std::lock_guard lock(job->mutex);
                      job->error = e.what();
                      job->state = JobState::failed;
                    }
                  }).share();
  return job->id;
}

std::shared_ptr<AnalysisService::Job> AnalysisService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) throw JobNotFound(id);
  return it->second;
}

JobSnapshot AnalysisService::status(const std::string& id) const {
  auto job = find(id);
  std::lock_guard lock(job->mutex);
  return {job->id, job->state, job->events, job->error};
}

AnalysisReport AnalysisService::report(const std::string& id) const {
  auto job = find(id);
  std::lock_guard lock(job->mutex);
  if (!job->report) {
    if (job->state == JobState::failed) throw Error("analysis " + id + " failed: " + job->error);
    throw JobNotReady(id);
  }
  return *job->report;
}

std::vector<ConsensusTheme> AnalysisService::consensus(const std::string& id, double threshold) const {
  return recompute_consensus(report(id), threshold).consensus;
}

void AnalysisService::wait(const std::string& id) const { find(id)->finished.wait(); }

json providers_json() {
  json out = json::array();
  for (ProviderKind kind : {ProviderKind::openai_compatible, ProviderKind::gemini, ProviderKind::anthropic,
                            ProviderKind::openrouter, ProviderKind::mock}) {
    json entry = {{"kind", to_string(kind)}, {"native_seed", supports_native_seed(kind)}};
    if (kind == ProviderKind::mock) {
      entry["required"] = {"scenario"};
      entry["optional"] = json::array();
    } else {
      entry["required"] = {"model", "api_key"};
      entry["optional"] = {"endpoint", "timeout_ms"};
      entry["api_key_env"] = api_key_env_var(kind);
      entry["default_endpoint"] = default_endpoint(kind);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

namespace {

ApiResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

ApiResponse error_response(int status, const std::string& message) {
  return json_response(status, {{"error", message}});
}

json snapshot_json(const JobSnapshot& s) {
  json events = json::array();
  for (const auto& e : s.events) {
    events.push_back({{"stage", e.stage}, {"current", e.current}, {"total", e.total}, {"message", e.message}});
  }
  json out = {{"id", s.id}, {"status", to_string(s.state)}, {"events", events}};
  if (!s.error.empty()) out["error"] = s.error;
  return out;
}

}  // namespace

ApiResponse handle_api(AnalysisService& service, const std::string& method, const std::string& path,
                       const std::string& body) {
  static const std::regex kJob(R"(^/api/analyses/([0-9]+)(/report|/consensus)?$)");
  try {
    if (path == "/api/providers") {
      if (method != "GET") return error_response(405, "method not allowed");
      return json_response(200, providers_json());
    }
    if (path == "/api/analyses") {
      if (method != "POST") return error_response(405, "method not allowed");
      json doc = json::parse(body, nullptr, false);
      if (doc.is_discarded() || !doc.is_object()) return error_response(400, "body must be a JSON object");
      if (!doc.contains("document") || !doc["document"].is_string()) {
        return error_response(400, "body needs a \"document\" string");
      }
      std::string text = doc["document"].get<std::string>();
      doc.erase("document");
      if (doc.contains("scenario") && doc["scenario"].is_string()) {
        return error_response(400, "scenario must be given inline");
      }
      AnalysisConfig config = config_from_json(doc);
      apply_env_api_key(config.provider);
      return json_response(202, {{"id", service.submit(std::move(config), std::move(text))}});
    }
    std::smatch m;
    if (std::regex_match(path, m, kJob)) {
      const std::string id = m[1];
      const std::string tail = m[2];
      if (tail.empty()) {
        if (method != "GET") return error_response(405, "method not allowed");
        return json_response(200, snapshot_json(service.status(id)));
      }
      if (tail == "/report") {
        if (method != "GET") return error_response(405, "method not allowed");
        return json_response(200, report_to_json(service.report(id)));
      }
      if (method != "POST") return error_response(405, "method not allowed");
      json doc = json::parse(body, nullptr, false);
      if (doc.is_discarded() || !doc.contains("threshold") || !doc["threshold"].is_number()) {
        return error_response(400, "body needs a numeric \"threshold\"");
      }
      return json_response(200, consensus_to_json(service.consensus(id, doc["threshold"].get<double>())));
    }
    return error_response(404, "not found");
  } catch (const JobNotFound& e) {
    return error_response(404, e.what());
  } catch (const JobNotReady& e) {
    return error_response(409, e.what());
  } catch (const InvalidThreshold& e) {
    return error_response(400, e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
}

}  // namespace thematic
