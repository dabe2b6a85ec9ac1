#include "thematic/gateway.hpp"

#include <algorithm>
#include <json.hpp>
#include <random>
#include <thread>

namespace thematic {

using nlohmann::json;

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::openai_compatible: return "openai_compatible";
    case ProviderKind::gemini: return "gemini";
    case ProviderKind::anthropic: return "anthropic";
    case ProviderKind::openrouter: return "openrouter";
    case ProviderKind::mock: return "mock";
  }
  return "unknown";
}

ProviderKind provider_kind_from_string(std::string_view name) {
  if (name == "openai_compatible" || name == "openai" || name == "groq" || name == "deepseek" ||
      name == "azure") {
    return ProviderKind::openai_compatible;
  }
  if (name == "gemini") return ProviderKind::gemini;
  if (name == "anthropic" || name == "claude") return ProviderKind::anthropic;
  if (name == "openrouter") return ProviderKind::openrouter;
  if (name == "mock") return ProviderKind::mock;
  throw InvalidArgument("unknown provider: " + std::string(name));
}

std::string_view api_key_env_var(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::openai_compatible: return "OPENAI_API_KEY";
    case ProviderKind::gemini: return "GEMINI_API_KEY";
    case ProviderKind::anthropic: return "ANTHROPIC_API_KEY";
    case ProviderKind::openrouter: return "OPENROUTER_API_KEY";
    case ProviderKind::mock: return "";
  }
  return "";
}

std::string_view default_endpoint(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::openai_compatible: return "https://api.openai.com/v1";
    case ProviderKind::gemini: return "https://generativelanguage.googleapis.com";
    case ProviderKind::anthropic: return "https://api.anthropic.com";
    case ProviderKind::openrouter: return "https://openrouter.ai/api/v1";
    case ProviderKind::mock: return "";
  }
  return "";
}

bool supports_native_seed(ProviderKind kind) {
  return kind == ProviderKind::openai_compatible || kind == ProviderKind::openrouter ||
         kind == ProviderKind::gemini || kind == ProviderKind::mock;
}

std::string ProviderConfig::effective_endpoint() const {
  std::string url = endpoint.empty() ? std::string(default_endpoint(kind)) : endpoint;
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

void ProviderConfig::validate() const {
  if (timeout.count() <= 0) throw InvalidArgument("provider timeout must be positive");
  if (kind == ProviderKind::mock) {
    if (!scenario) throw InvalidArgument("mock provider needs a scenario");
    return;
  }
  parse_url(effective_endpoint());
  if (model.empty()) throw InvalidArgument("provider model must be set");
}

void CompletionRequest::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw InvalidArgument("temperature must lie in [0.0, 2.0]");
  }
  if (max_output_tokens <= 0) throw InvalidArgument("max_output_tokens must be positive");
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt, std::chrono::milliseconds jitter) const {
  return base_delay * (1LL << std::max(0, attempt - 1)) + jitter;
}

HttpRequest build_http_request(const ProviderConfig& config, const CompletionRequest& request) {
  HttpRequest http;
  http.timeout = config.timeout;
  http.headers.emplace_back("Content-Type", "application/json");
  const std::string base = config.effective_endpoint();
  json body;
  switch (config.kind) {
    case ProviderKind::openai_compatible:
    case ProviderKind::openrouter:
      http.url = base + "/chat/completions";
      http.headers.emplace_back("Authorization", "Bearer " + config.api_key);
      body = {{"model", config.model},
              {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
              {"temperature", request.temperature},
              {"seed", request.seed},
              {"max_tokens", request.max_output_tokens}};
      break;
    case ProviderKind::anthropic:
      http.url = base + "/v1/messages";
      http.headers.emplace_back("x-api-key", config.api_key);
      http.headers.emplace_back("anthropic-version", "2023-06-01");
      // The Messages API caps temperature at 1.0 and has no seed parameter;
      // seed variation reaches it only through the rendered prompt.
      body = {{"model", config.model},
              {"max_tokens", request.max_output_tokens},
              {"temperature", std::min(request.temperature, 1.0)},
              {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})}};
      break;
    case ProviderKind::gemini:
      http.url = base + "/v1beta/models/" + config.model + ":generateContent";
      http.headers.emplace_back("x-goog-api-key", config.api_key);
      body = {{"contents",
               json::array({{{"role", "user"}, {"parts", json::array({{{"text", request.prompt}}})}}})},
              {"generationConfig",
               {{"temperature", request.temperature},
                {"seed", request.seed},
                {"maxOutputTokens", request.max_output_tokens}}}};
      break;
    case ProviderKind::mock:
      throw InvalidArgument("mock provider has no HTTP wire format");
  }
  http.body = body.dump();
  return http;
}

std::string parse_completion_body(ProviderKind kind, const std::string& body) {
  if (kind == ProviderKind::mock) return body;
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw MalformedResponse("provider response is not JSON", 1);
  try {
    switch (kind) {
      case ProviderKind::openai_compatible:
      case ProviderKind::openrouter:
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
      case ProviderKind::anthropic: {
        std::string text;
        for (const auto& block : doc.at("content")) {
          if (block.value("type", "") == "text") text += block.at("text").get<std::string>();
        }
        return text;
      }
      case ProviderKind::gemini: {
        std::string text;
        for (const auto& part : doc.at("candidates").at(0).at("content").at("parts")) {
          if (part.contains("text")) text += part.at("text").get<std::string>();
        }
        return text;
      }
      case ProviderKind::mock: break;
    }
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("unexpected provider response shape: ") + e.what(), 1);
  }
  return body;
}

class Gateway::Slot {
 public:
  explicit Slot(Semaphore& s, std::size_t cap) : s_(s) {
    std::unique_lock lock(s_.mutex);
    s_.cv.wait(lock, [&] { return s_.in_use < cap; });
    ++s_.in_use;
  }
  ~Slot() {
    {
      std::lock_guard lock(s_.mutex);
      --s_.in_use;
    }
    s_.cv.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  Semaphore& s_;
};

Gateway::Gateway() : Gateway(make_http_transport()) {}

Gateway::Gateway(std::shared_ptr<HttpTransport> transport, RetryPolicy policy, Sleeper sleeper,
                 std::size_t concurrency_cap)
    : transport_(std::move(transport)),
      policy_(policy),
      sleeper_(std::move(sleeper)),
      cap_(std::max<std::size_t>(1, concurrency_cap)) {
  if (policy_.max_attempts < 1 || policy_.max_attempts > 3) {
    throw InvalidArgument("max_attempts must lie in [1, 3]");
  }
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Gateway::Semaphore& Gateway::semaphore_for(const ProviderConfig& config) {
  const std::string key = std::string(to_string(config.kind)) + "|" + config.effective_endpoint();
  std::lock_guard lock(registry_mutex_);
  auto& slot = semaphores_[key];
  if (!slot) slot = std::make_unique<Semaphore>();
  return *slot;
}

HttpResponse Gateway::send_once(const ProviderConfig& config, const CompletionRequest& request,
                                int attempt) {
  if (config.kind != ProviderKind::mock) {
    return transport_->post(build_http_request(config, request));
  }
  const MockOutcome outcome = mock_generate(*config.scenario, request.seed, attempt);
  if (outcome.text) return {200, *outcome.text};
  switch (*outcome.failure) {
    case MockFailureKind::transport: throw TransportError("mock: connection reset");
    case MockFailureKind::timeout: throw Timeout("mock: request timed out");
    case MockFailureKind::server_error: return {503, "mock: service unavailable"};
    case MockFailureKind::rate_limit: return {429, "mock: rate limited"};
    case MockFailureKind::auth: return {401, "mock: invalid key"};
  }
  return {500, ""};
}

CompletionResult Gateway::complete(const ProviderConfig& config, const CompletionRequest& request) {
  config.validate();
  request.validate();

  Slot slot(semaphore_for(config), cap_);
  std::mt19937 jitter_rng{std::random_device{}()};
  std::uniform_int_distribution<long long> jitter_dist(0, policy_.max_jitter.count());

  CompletionResult result;
  result.provider_echo["kind"] = std::string(to_string(config.kind));
  result.provider_echo["model"] = config.model;
  result.provider_echo["native_seed"] = supports_native_seed(config.kind) ? "true" : "false";
  if (config.kind != ProviderKind::mock) {
    result.provider_echo["host"] = parse_url(config.effective_endpoint()).host;
  }
  if (config.kind == ProviderKind::anthropic && request.temperature > 1.0) {
    result.provider_echo["temperature_clamped"] = "1.0";
  }

  std::string statuses;
  auto note_status = [&](const std::string& s) {
    if (!statuses.empty()) statuses += ",";
    statuses += s;
    result.provider_echo["attempt_statuses"] = statuses;
  };

  const auto started = std::chrono::steady_clock::now();
  std::exception_ptr last_cause;
  bool last_was_rate_limit = false;
  for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
    result.attempts = attempt;
    try {
      const HttpResponse response = send_once(config, request, attempt);
      note_status(std::to_string(response.status));
      if (response.status >= 200 && response.status < 300) {
        try {
          result.raw_text = parse_completion_body(config.kind, response.body);
        } catch (const MalformedResponse& e) {
          throw MalformedResponse(e.what(), attempt);
        }
        result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);
        result.provider_echo["latency_ms"] = std::to_string(result.latency.count());
        return result;
      }
      if (response.status == 401 || response.status == 403) {
        throw AuthError("provider rejected credentials (HTTP " + std::to_string(response.status) + ")",
                        attempt);
      }
      if (response.status == 429) {
        last_was_rate_limit = true;
        last_cause = std::make_exception_ptr(RateLimited("HTTP 429", attempt));
      } else if (response.status >= 500) {
        last_was_rate_limit = false;
        last_cause = std::make_exception_ptr(
            TransportError("HTTP " + std::to_string(response.status) + " from provider"));
      } else {
        throw RequestRejected("provider rejected request (HTTP " + std::to_string(response.status) + ")",
                              attempt, response.status);
      }
    } catch (const Timeout&) {
      note_status("timeout");
      last_was_rate_limit = false;
      last_cause = std::current_exception();
    } catch (const TransportError&) {
      note_status("transport_error");
      last_was_rate_limit = false;
      last_cause = std::current_exception();
    }
    if (attempt < policy_.max_attempts) {
      sleeper_(policy_.delay_after(attempt, std::chrono::milliseconds(jitter_dist(jitter_rng))));
    }
  }

  const int attempts = policy_.max_attempts;
  if (last_was_rate_limit) {
    throw RateLimited("provider still rate limiting after " + std::to_string(attempts) + " attempts",
                      attempts);
  }
  std::string cause = "unknown";
  try {
    std::rethrow_exception(last_cause);
  } catch (const std::exception& e) {
    cause = e.what();
  }
  throw RetriesExhausted("gave up after " + std::to_string(attempts) + " attempts: " + cause, attempts,
                         last_cause);
}

CompletionResult complete(const ProviderConfig& config, const CompletionRequest& request) {
  static Gateway gateway;
  return gateway.complete(config, request);
}

ProviderConfig mock_provider(MockScenario scenario) {
  ProviderConfig config;
  config.kind = ProviderKind::mock;
  config.model = "mock";
  config.scenario = std::make_shared<const MockScenario>(std::move(scenario));
  return config;
}

}  // namespace thematic
