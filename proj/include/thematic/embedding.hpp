#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thematic/error.hpp"

namespace thematic {

class HttpTransport;

inline constexpr std::size_t kEmbeddingDim = 384;

struct EmbeddingVector {
  std::array<double, kEmbeddingDim> values{};

  double norm() const;
  bool operator==(const EmbeddingVector&) const = default;
};

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class EmptyText : public Error {
 public:
  EmptyText() : Error("cannot embed an empty string") {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("cosine similarity is undefined for a zero vector") {}
};

/// Source of 384-dimensional sentence embeddings. Implementations must be
/// safe to call from several threads at once.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  // Raw vectors, one per text; normalization happens in embed().
  virtual std::vector<EmbeddingVector> encode(std::span<const std::string> texts) const = 0;
  virtual bool deterministic() const = 0;
  virtual std::string name() const = 0;
  std::size_t dimension() const { return kEmbeddingDim; }
};

/// Hashed bag of words. Tokens are maximal runs of ASCII alphanumerics and
/// non-ASCII bytes, ASCII-lowercased. Each token's 64-bit FNV-1a hash h picks
/// bucket h % 384 and sign -1 if bit 63 of h is set, +1 otherwise.
class ReferenceEmbedder final : public EmbeddingBackend {
 public:
  std::vector<EmbeddingVector> encode(std::span<const std::string> texts) const override;
  bool deterministic() const override { return true; }
  std::string name() const override { return "reference"; }

  // Unnormalized bucket counts for one text.
  static EmbeddingVector raw_counts(std::string_view text);
};

/// Remote sentence-embedding service. Sends {"model": m, "input": [texts]} and
/// expects {"data": [{"embedding": [384 numbers]}, ...]} in input order.
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  HttpEmbeddingBackend(std::string endpoint, std::string model, std::shared_ptr<HttpTransport> transport);

  std::vector<EmbeddingVector> encode(std::span<const std::string> texts) const override;
  bool deterministic() const override { return false; }
  std::string name() const override { return "http:" + endpoint_; }

 private:
  std::string endpoint_;
  std::string model_;
  std::shared_ptr<HttpTransport> transport_;
};

std::shared_ptr<const EmbeddingBackend> reference_embedder();

// "reference" or an http(s) URL.
std::shared_ptr<const EmbeddingBackend> make_embedding_backend(const std::string& spec);

/// Embeds and L2-normalizes. Throws EmptyText for empty strings.
std::vector<EmbeddingVector> embed(const EmbeddingBackend& backend, std::span<const std::string> texts);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Jaccard coefficient of lowercased token sets.
double string_similarity(std::string_view a, std::string_view b);

std::vector<std::string> tokenize(std::string_view text);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace thematic
