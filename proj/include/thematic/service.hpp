#pragma once

#include <cstddef>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thematic/orchestrator.hpp"

namespace thematic {

enum class JobState { running, done, failed };
std::string_view to_string(JobState state);

struct JobSnapshot {
  std::string id;
  JobState state = JobState::running;
  std::vector<ProgressEvent> events;
  std::string error;
};

class JobNotFound : public Error {
 public:
  explicit JobNotFound(const std::string& id) : Error("no analysis with id " + id) {}
};

class JobNotReady : public Error {
 public:
  explicit JobNotReady(const std::string& id) : Error("analysis " + id + " has not finished") {}
};

/// In-process registry of ensemble jobs. Each job runs on its own thread with
/// isolated state; documents and keys live only as long as the job runs.
class AnalysisService {
 public:
  explicit AnalysisService(RunOptions defaults = {});
  ~AnalysisService();
  AnalysisService(const AnalysisService&) = delete;
  AnalysisService& operator=(const AnalysisService&) = delete;

  std::string submit(AnalysisConfig config, std::string document_text);
  JobSnapshot status(const std::string& id) const;
  AnalysisReport report(const std::string& id) const;
  std::vector<ConsensusTheme> consensus(const std::string& id, double threshold) const;
  void wait(const std::string& id) const;

 private:
  struct Job;
  std::shared_ptr<Job> find(const std::string& id) const;

  RunOptions defaults_;
  mutable std::mutex mutex_;
  std::size_t next_id_ = 1;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Routes one API request. Bodies are JSON; errors come back as
/// {"error": message} with a 4xx status.
ApiResponse handle_api(AnalysisService& service, const std::string& method, const std::string& path,
                       const std::string& body);

nlohmann::json providers_json();

/// Blocking HTTP server for the API, optionally hosting static files at "/".
/// Returns false when the port cannot be bound.
bool serve(AnalysisService& service, const std::string& host, int port,
           const std::optional<std::filesystem::path>& static_dir);

}  // namespace thematic
