#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cmath>
#include <deque>
#include <thread>

#include "thematic/gateway.hpp"
#include "thematic/json_extract.hpp"
#include "thematic/mock_provider.hpp"

using namespace thematic;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

const std::string kKey = "sk-test-SECRET-0123456789";

// Scripted transport: each post pops the next step. A status of -1 throws
// Timeout, -2 throws TransportError.
class ScriptedTransport : public HttpTransport {
 public:
  explicit ScriptedTransport(std::deque<int> steps, std::string body = {})
      : steps_(std::move(steps)), body_(std::move(body)) {}

  HttpResponse post(const HttpRequest& request) override {
    std::lock_guard lock(mutex_);
    requests.push_back(request);
    const int step = steps_.empty() ? 200 : steps_.front();
    if (!steps_.empty()) steps_.pop_front();
    if (step == -1) throw Timeout("scripted timeout");
    if (step == -2) throw TransportError("scripted reset");
    return {step, step == 200 ? body_ : "{\"error\": \"nope\"}"};
  }

  std::vector<HttpRequest> requests;

 private:
  std::mutex mutex_;
  std::deque<int> steps_;
  std::string body_;
};

std::string openai_body(const std::string& content) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

ProviderConfig openai_config(const std::string& endpoint = "http://127.0.0.1:9/v1") {
  ProviderConfig c;
  c.kind = ProviderKind::openai_compatible;
  c.endpoint = endpoint;
  c.model = "test-model";
  c.api_key = kKey;
  return c;
}

CompletionRequest request_for(Seed seed) {
  CompletionRequest r;
  r.prompt = "Analyze this. Run ID: " + std::to_string(seed);
  r.seed = seed;
  return r;
}

struct RecordingSleeper {
  std::shared_ptr<std::vector<std::chrono::milliseconds>> delays =
      std::make_shared<std::vector<std::chrono::milliseconds>>();
  Sleeper fn() {
    return [d = delays](std::chrono::milliseconds ms) { d->push_back(ms); };
  }
};

std::string header(const HttpRequest& r, const std::string& name) {
  for (const auto& [k, v] : r.headers) {
    if (k == name) return v;
  }
  return {};
}

MockScenario simple_scenario() {
  MockScenario s;
  s.themes = {{"Fear", "Worry about being alone", {"q1"}, 1.0, MockTheme::Category::theme},
              {"Hope", "Looking forward", {"q2"}, 0.5, MockTheme::Category::pattern}};
  return s;
}

}  // namespace

TEST_CASE("wire formats") {
  const CompletionRequest req = request_for(42);

  SUBCASE("openai compatible") {
    const auto http = build_http_request(openai_config(), req);
    CHECK(http.url == "http://127.0.0.1:9/v1/chat/completions");
    CHECK(header(http, "Authorization") == "Bearer " + kKey);
    const json body = json::parse(http.body);
    CHECK(body["seed"] == 42);
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.7);
    CHECK(body["messages"][0]["content"] == req.prompt);
    CHECK(http.body.find(kKey) == std::string::npos);
  }
  SUBCASE("anthropic") {
    ProviderConfig c = openai_config("https://api.anthropic.com");
    c.kind = ProviderKind::anthropic;
    CompletionRequest hot = req;
    hot.temperature = 1.6;
    const auto http = build_http_request(c, hot);
    CHECK(http.url == "https://api.anthropic.com/v1/messages");
    CHECK(header(http, "x-api-key") == kKey);
    CHECK(header(http, "anthropic-version") == "2023-06-01");
    const json body = json::parse(http.body);
    CHECK(body["temperature"] == 1.0);
    CHECK_FALSE(body.contains("seed"));
  }
  SUBCASE("gemini") {
    ProviderConfig c = openai_config();
    c.kind = ProviderKind::gemini;
    c.endpoint.clear();
    c.model = "gemini-1.5-pro";
    const auto http = build_http_request(c, req);
    CHECK(http.url == std::string(default_endpoint(ProviderKind::gemini)) +
                          "/v1beta/models/gemini-1.5-pro:generateContent");
    CHECK(header(http, "x-goog-api-key") == kKey);
    const json body = json::parse(http.body);
    CHECK(body["generationConfig"]["seed"] == 42);
    CHECK(body["contents"][0]["parts"][0]["text"] == req.prompt);
  }
}

TEST_CASE("response bodies") {
  CHECK(parse_completion_body(ProviderKind::openai_compatible, openai_body("hi")) == "hi");
  CHECK(parse_completion_body(ProviderKind::anthropic,
                              R"({"content": [{"type": "text", "text": "a"}, {"type": "text", "text": "b"}]})") == "ab");
  CHECK(parse_completion_body(ProviderKind::gemini,
                              R"({"candidates": [{"content": {"parts": [{"text": "x"}, {"text": "y"}]}}]})") == "xy");
  CHECK_THROWS_AS(parse_completion_body(ProviderKind::openai_compatible, "not json"), MalformedResponse);
  CHECK_THROWS_AS(parse_completion_body(ProviderKind::openai_compatible, R"({"choices": []})"), MalformedResponse);
}

TEST_CASE("provider names") {
  CHECK(provider_kind_from_string("openai") == ProviderKind::openai_compatible);
  CHECK(provider_kind_from_string("claude") == ProviderKind::anthropic);
  CHECK(provider_kind_from_string("mock") == ProviderKind::mock);
  CHECK_THROWS_AS(provider_kind_from_string("nope"), InvalidArgument);
  CHECK(api_key_env_var(ProviderKind::gemini) == "GEMINI_API_KEY");
}

TEST_CASE("retry schedule") {
  RecordingSleeper sleeper;
  SUBCASE("rate limited twice, then success") {
    auto t = std::make_shared<ScriptedTransport>(std::deque<int>{429, 429, 200}, openai_body("done"));
    Gateway g(t, {}, sleeper.fn());
    const auto r = g.complete(openai_config(), request_for(1));
    CHECK(r.raw_text == "done");
    CHECK(r.attempts == 3);
    CHECK(r.provider_echo.at("attempt_statuses") == "429,429,200");
    REQUIRE(sleeper.delays->size() == 2);
    CHECK((*sleeper.delays)[0] >= 1000ms);
    CHECK((*sleeper.delays)[0] <= 1250ms);
    CHECK((*sleeper.delays)[1] >= 2000ms);
    CHECK((*sleeper.delays)[1] <= 2250ms);
  }
  SUBCASE("authentication failures are not retried") {
    auto t = std::make_shared<ScriptedTransport>(std::deque<int>{401, 200});
    Gateway g(t, {}, sleeper.fn());
    try {
      g.complete(openai_config(), request_for(1));
      FAIL("expected AuthError");
    } catch (const AuthError& e) {
      CHECK(e.attempts() == 1);
      CHECK(std::string(e.what()).find(kKey) == std::string::npos);
    }
    CHECK(sleeper.delays->empty());
    CHECK(t->requests.size() == 1);
  }
  SUBCASE("persistent rate limiting") {
    auto t = std::make_shared<ScriptedTransport>(std::deque<int>{429, 429, 429});
    Gateway g(t, {}, sleeper.fn());
    CHECK_THROWS_AS(g.complete(openai_config(), request_for(1)), RateLimited);
    CHECK(t->requests.size() == 3);
  }
  SUBCASE("server errors exhaust the retries") {
    auto t = std::make_shared<ScriptedTransport>(std::deque<int>{503, -2, -1});
    Gateway g(t, {}, sleeper.fn());
    try {
      g.complete(openai_config(), request_for(1));
      FAIL("expected RetriesExhausted");
    } catch (const RetriesExhausted& e) {
      CHECK(e.attempts() == 3);
      CHECK_THROWS_AS(std::rethrow_exception(e.last_cause()), Timeout);
    }
    CHECK(sleeper.delays->size() == 2);
  }
  SUBCASE("other client errors are rejected at once") {
    auto t = std::make_shared<ScriptedTransport>(std::deque<int>{400});
    Gateway g(t, {}, sleeper.fn());
    try {
      g.complete(openai_config(), request_for(1));
      FAIL("expected RequestRejected");
    } catch (const RequestRejected& e) {
      CHECK(e.status() == 400);
    }
  }
  SUBCASE("malformed success bodies") {
    auto t = std::make_shared<ScriptedTransport>(std::deque<int>{200}, "<html>");
    Gateway g(t, {}, sleeper.fn());
    CHECK_THROWS_AS(g.complete(openai_config(), request_for(1)), MalformedResponse);
  }
}

TEST_CASE("delay schedule") {
  const RetryPolicy p;
  CHECK(p.delay_after(1, 0ms) == 1000ms);
  CHECK(p.delay_after(2, 0ms) == 2000ms);
  CHECK(p.delay_after(2, 250ms) == 2250ms);
}

TEST_CASE("request validation") {
  Gateway g(std::make_shared<ScriptedTransport>(std::deque<int>{}), {}, [](auto) {});
  CompletionRequest r = request_for(1);
  r.temperature = 2.5;
  CHECK_THROWS_AS(g.complete(openai_config(), r), InvalidArgument);
  ProviderConfig c = openai_config("ftp://nowhere");
  CHECK_THROWS_AS(g.complete(c, request_for(1)), InvalidArgument);
  c = openai_config();
  c.model.clear();
  CHECK_THROWS_AS(g.complete(c, request_for(1)), InvalidArgument);
}

TEST_CASE("concurrency cap per provider") {
  class SlowTransport : public HttpTransport {
   public:
    HttpResponse post(const HttpRequest&) override {
      const int now = ++active;
      int seen = peak.load();
      while (now > seen && !peak.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(20ms);
      --active;
      return {200, openai_body("ok")};
    }
    std::atomic<int> active{0};
    std::atomic<int> peak{0};
  };
  auto t = std::make_shared<SlowTransport>();
  Gateway g(t, {}, [](auto) {}, 2);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&g, i] { g.complete(openai_config(), request_for(i)); });
  }
  for (auto& th : threads) th.join();
  CHECK(t->peak.load() <= 2);
  CHECK(t->peak.load() >= 1);
}

TEST_CASE("real HTTP round trip with retries") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string auth_seen;
  std::mutex auth_mutex;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(auth_mutex);
      auth_seen = req.get_header_value("Authorization");
    }
    if (++hits <= 2) {
      res.status = 429;
      res.set_content("{}", "application/json");
      return;
    }
    const json body = json::parse(req.body);
    res.set_content(openai_body("seed " + std::to_string(body["seed"].get<int>())), "application/json");
  });
  server.Post("/slow/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(1500ms);
    res.set_content(openai_body("late"), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RecordingSleeper sleeper;
  Gateway g(make_http_transport(), {}, sleeper.fn());
  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  const auto r = g.complete(openai_config(base + "/v1"), request_for(77));
  CHECK(r.raw_text == "seed 77");
  CHECK(r.attempts == 3);
  CHECK(hits.load() == 3);
  CHECK(sleeper.delays->size() == 2);
  {
    std::lock_guard lock(auth_mutex);
    CHECK(auth_seen == "Bearer " + kKey);
  }
  CHECK(r.provider_echo.at("host") == "127.0.0.1");
  for (const auto& [k, v] : r.provider_echo) CHECK(v.find(kKey) == std::string::npos);

  ProviderConfig slow = openai_config(base + "/slow");
  slow.timeout = 300ms;
  Gateway once(make_http_transport(), RetryPolicy{1, 1000ms, 250ms}, sleeper.fn());
  try {
    once.complete(slow, request_for(1));
    FAIL("expected RetriesExhausted");
  } catch (const RetriesExhausted& e) {
    CHECK_THROWS_AS(std::rethrow_exception(e.last_cause()), Timeout);
  }

  server.stop();
  worker.join();
}

TEST_CASE("mock provider is a pure function of scenario and seed") {
  const ProviderConfig c = mock_provider(simple_scenario());
  Gateway g(std::make_shared<ScriptedTransport>(std::deque<int>{}), {}, [](auto) {});
  const auto a = g.complete(c, request_for(42));
  const auto b = g.complete(c, request_for(42));
  CHECK(a.raw_text == b.raw_text);
  CHECK(a.provider_echo.at("kind") == "mock");

  MockScenario salted = simple_scenario();
  salted.salt = 99;
  bool differs = false;
  for (Seed s = 0; s < 40 && !differs; ++s) {
    differs = mock_inclusion(salted, s) != mock_inclusion(simple_scenario(), s);
  }
  CHECK(differs);
}

TEST_CASE("mock inclusion follows the configured probabilities") {
  MockScenario s;
  const double probs[] = {0.85, 0.10, 0.5, 1.0, 0.0};
  for (double p : probs) s.themes.push_back({"t" + std::to_string(p), "d", {}, p, MockTheme::Category::theme});
  const int n = 4000;
  std::vector<int> counts(std::size(probs), 0);
  for (Seed seed = 0; seed < static_cast<Seed>(n); ++seed) {
    const auto inc = mock_inclusion(s, seed * 7919 + 3);
    for (std::size_t i = 0; i < inc.size(); ++i) counts[i] += inc[i];
  }
  for (std::size_t i = 0; i < std::size(probs); ++i) {
    const double mean = n * probs[i];
    const double sd = std::sqrt(n * probs[i] * (1 - probs[i]));
    CHECK(std::fabs(counts[i] - mean) <= 5 * sd + 1e-9);
  }
}

TEST_CASE("mock wrappers and schemas parse") {
  for (WrapperStyle w : {WrapperStyle::plain, WrapperStyle::fenced, WrapperStyle::fenced_prose}) {
    MockScenario s = simple_scenario();
    s.wrapper = w;
    s.noise = 0.4;
    for (Seed seed : {1, 2, 3}) {
      const auto out = mock_generate(s, seed, 1);
      REQUIRE(out.text);
      const auto parsed = extract_json(*out.text, SchemaMode::default_schema);
      CHECK(parsed.value["majorEmotionalThemes"].size() == 1);
      CHECK(parsed.value["majorEmotionalThemes"][0]["theme_name"] == "Fear");
    }
  }
  MockScenario custom = simple_scenario();
  custom.schema = SchemaShape::custom;
  custom.custom_fields.array = "findings";
  custom.custom_fields.name = "label";
  const auto out = mock_generate(custom, 5, 1);
  const json doc = extract_json(*out.text, SchemaMode::custom).value;
  CHECK(doc["findings"][0]["label"] == "Fear");
  CHECK_THROWS_AS(extract_json(*out.text, SchemaMode::default_schema), SchemaViolation);
}

TEST_CASE("scripted mock failures") {
  MockScenario s = simple_scenario();
  s.failures[7] = {MockFailureKind::server_error, 2};
  s.failures[8] = {MockFailureKind::auth, 0};
  s.failures[9] = {MockFailureKind::timeout, 0};
  const ProviderConfig c = mock_provider(s);
  RecordingSleeper sleeper;
  Gateway g(std::make_shared<ScriptedTransport>(std::deque<int>{}), {}, sleeper.fn());

  const auto recovered = g.complete(c, request_for(7));
  CHECK(recovered.attempts == 3);
  CHECK(recovered.provider_echo.at("attempt_statuses") == "503,503,200");
  CHECK_THROWS_AS(g.complete(c, request_for(8)), AuthError);
  CHECK_THROWS_AS(g.complete(c, request_for(9)), RetriesExhausted);
  CHECK_NOTHROW(g.complete(c, request_for(10)));
}
