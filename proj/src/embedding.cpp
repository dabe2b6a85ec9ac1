#include "thematic/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>

#include "thematic/http.hpp"

namespace thematic {

namespace {

bool token_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

double EmbeddingVector::norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (token_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

EmbeddingVector ReferenceEmbedder::raw_counts(std::string_view text) {
  EmbeddingVector v;
  std::vector<std::string> tokens = tokenize(text);
  // Punctuation-only text still needs a direction; hash it whole.
  if (tokens.empty()) tokens.emplace_back(text);
  for (const std::string& token : tokens) {
    const std::uint64_t h = fnv1a64(token);
    v.values[h % kEmbeddingDim] += (h >> 63) != 0 ? -1.0 : 1.0;
  }
  return v;
}

std::vector<EmbeddingVector> ReferenceEmbedder::encode(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(raw_counts(t));
  return out;
}

HttpEmbeddingBackend::HttpEmbeddingBackend(std::string endpoint, std::string model,
                                           std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), transport_(std::move(transport)) {
  parse_url(endpoint_);
}

std::vector<EmbeddingVector> HttpEmbeddingBackend::encode(std::span<const std::string> texts) const {
  using nlohmann::json;
  HttpRequest request;
  request.url = endpoint_;
  request.headers.emplace_back("Content-Type", "application/json");
  request.body = json{{"model", model_}, {"input", std::vector<std::string>(texts.begin(), texts.end())}}.dump();
  HttpResponse response;
  try {
    response = transport_->post(request);
  } catch (const Error& e) {
    throw BackendUnavailable(std::string("embedding backend unreachable: ") + e.what());
  }
  if (response.status != 200) {
    throw BackendUnavailable("embedding backend returned HTTP " + std::to_string(response.status));
  }
  const json doc = json::parse(response.body, nullptr, false);
  if (doc.is_discarded() || !doc.contains("data") || !doc["data"].is_array() ||
      doc["data"].size() != texts.size()) {
    throw BackendUnavailable("embedding backend returned an unexpected body");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const json& item : doc["data"]) {
    const json& values = item.value("embedding", json::array());
    if (!values.is_array() || values.size() != kEmbeddingDim) {
      throw BackendUnavailable("embedding backend returned a vector of the wrong dimension");
    }
    EmbeddingVector v;
    for (std::size_t k = 0; k < kEmbeddingDim; ++k) {
      if (!values[k].is_number()) throw BackendUnavailable("embedding component is not a number");
      v.values[k] = values[k].get<double>();
    }
    out.push_back(v);
  }
  return out;
}

std::shared_ptr<const EmbeddingBackend> reference_embedder() {
  static const auto instance = std::make_shared<const ReferenceEmbedder>();
  return instance;
}

std::shared_ptr<const EmbeddingBackend> make_embedding_backend(const std::string& spec) {
  if (spec.empty() || spec == "reference") return reference_embedder();
  return std::make_shared<const HttpEmbeddingBackend>(spec, "all-MiniLM-L6-v2", make_http_transport());
}

std::vector<EmbeddingVector> embed(const EmbeddingBackend& backend, std::span<const std::string> texts) {
  for (const std::string& t : texts) {
    if (t.empty()) throw EmptyText();
  }
  if (texts.empty()) return {};
  std::vector<EmbeddingVector> vectors = backend.encode(texts);
  if (vectors.size() != texts.size()) {
    throw BackendUnavailable("embedding backend returned the wrong number of vectors");
  }
  for (EmbeddingVector& v : vectors) {
    for (double x : v.values) {
      if (!std::isfinite(x)) throw BackendUnavailable("embedding contains a non-finite component");
    }
    const double n = v.norm();
    if (n == 0.0) throw ZeroVector();
    for (double& x : v.values) x /= n;
  }
  return vectors;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < kEmbeddingDim; ++k) {
    dot += a.values[k] * b.values[k];
    na += a.values[k] * a.values[k];
    nb += b.values[k] * b.values[k];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroVector();
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double string_similarity(std::string_view a, std::string_view b) {
  const std::vector<std::string> ta = tokenize(a);
  const std::vector<std::string> tb = tokenize(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

}  // namespace thematic
