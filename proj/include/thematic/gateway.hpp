#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "thematic/http.hpp"
#include "thematic/mock_provider.hpp"
#include "thematic/prompt.hpp"

namespace thematic {

enum class ProviderKind { openai_compatible, gemini, anthropic, openrouter, mock };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::mock;
  std::string endpoint;  // base URL; empty means the provider's public default
  std::string model;
  std::string api_key;   // never serialized or logged
  std::chrono::milliseconds timeout{120000};
  std::shared_ptr<const MockScenario> scenario;  // mock only

  void validate() const;
  std::string effective_endpoint() const;
};

std::string_view to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(std::string_view name);
// Environment variable consulted for the API key of each kind.
std::string_view api_key_env_var(ProviderKind kind);
std::string_view default_endpoint(ProviderKind kind);
bool supports_native_seed(ProviderKind kind);

struct CompletionRequest {
  std::string prompt;
  double temperature = 0.7;
  Seed seed = 0;
  int max_output_tokens = 8192;

  void validate() const;
};

struct CompletionResult {
  std::string raw_text;
  int attempts = 1;
  std::chrono::milliseconds latency{0};
  // Status codes, timings and provider metadata. Never holds the prompt,
  // the request body or the API key.
  std::map<std::string, std::string> provider_echo;
};

class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, int attempts) : Error(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class AuthError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class RateLimited : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// Non-retryable HTTP failure other than authentication (400, 404, ...).
class RequestRejected : public ProviderError {
 public:
  RequestRejected(const std::string& what, int attempts, int status)
      : ProviderError(what, attempts), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class RetriesExhausted : public ProviderError {
 public:
  RetriesExhausted(const std::string& what, int attempts, std::exception_ptr last_cause)
      : ProviderError(what, attempts), last_cause_(std::move(last_cause)) {}
  std::exception_ptr last_cause() const noexcept { return last_cause_; }

 private:
  std::exception_ptr last_cause_;
};

// The provider answered 2xx but the body is not in the expected wire shape.
class MalformedResponse : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_jitter{250};

  // Delay before attempt `attempt + 1`, given that attempt `attempt` failed.
  std::chrono::milliseconds delay_after(int attempt, std::chrono::milliseconds jitter) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Wire-level helpers, exposed so request shapes can be unit tested.
HttpRequest build_http_request(const ProviderConfig& config, const CompletionRequest& request);
std::string parse_completion_body(ProviderKind kind, const std::string& body);

/// Issues completions against one or more providers. Holds a per-provider
/// concurrency cap; everything else is per call.
class Gateway {
 public:
  Gateway();
  explicit Gateway(std::shared_ptr<HttpTransport> transport, RetryPolicy policy = {},
                   Sleeper sleeper = {}, std::size_t concurrency_cap = 4);

  CompletionResult complete(const ProviderConfig& config, const CompletionRequest& request);

  const RetryPolicy& policy() const noexcept { return policy_; }

 private:
  class Slot;
  struct Semaphore {
    std::mutex mutex;
    std::condition_variable cv;
    std::size_t in_use = 0;
  };

  Semaphore& semaphore_for(const ProviderConfig& config);
  HttpResponse send_once(const ProviderConfig& config, const CompletionRequest& request, int attempt);

  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  std::size_t cap_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<Semaphore>> semaphores_;
};

/// One-shot completion through a process-wide default gateway.
CompletionResult complete(const ProviderConfig& config, const CompletionRequest& request);

ProviderConfig mock_provider(MockScenario scenario);

}  // namespace thematic
