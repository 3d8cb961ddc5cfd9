#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylediv/textops.hpp"

namespace stylediv {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  bool zero() const noexcept;
};

struct StabilityScore {
  double value = 0.0;
  bool degenerate = false;  // either input had zero norm
};

// Cosine similarity clamped to [-1, 1]. Zero-norm inputs yield value 0 with
// the degenerate flag set. Throws std::invalid_argument on dim mismatch.
StabilityScore cosine_stability(const EmbeddingVector& a, const EmbeddingVector& b);

enum class EmbedderKind { deterministic_local, remote_http };

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::deterministic_local;
  std::size_t dim = 256;  // >= 2
  std::uint64_t seed = 0x7374796c6564ull;  // bucket seed for the local embedder

  // remote_http settings
  std::string endpoint;  // e.g. http://127.0.0.1:8080/v1/embeddings
  std::string model;
  std::string auth_env = "STYLEDIV_EMBED_TOKEN";
  int timeout_ms = 10000;
  int max_retries = 3;
  int retry_backoff_ms = 100;
  int max_in_flight = 4;

  std::string cache_path;  // empty disables the cache

  std::string id() const;  // stable provider identity for cache keys
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(const std::string& text) = 0;
  virtual std::string id() const = 0;
};

// Offline stand-in embedder: hash-bucketed token frequencies, L2-normalized.
// Bucket index for a token is fnv1a64(seed bytes || token bytes) % dim, so
// identical (text, seed, dim) always produce identical vectors. Not a
// substitute for a learned sentence encoder; exists so that pipelines run
// deterministically without network access.
class DeterministicLocalEmbedder final : public Embedder {
 public:
  explicit DeterministicLocalEmbedder(const EmbedderConfig& config,
                                      TokenizerConfig tokenizer = {});

  EmbeddingVector embed(const std::string& text) override;
  std::string id() const override;

  static std::size_t bucket_of(const std::string& token, std::uint64_t seed,
                               std::size_t dim);

 private:
  EmbedderConfig config_;
  TokenizerConfig tokenizer_;
};

// JSON-lines embedding cache: one record {key, dim, values} per line.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::string path);

  std::optional<EmbeddingVector> get(const std::string& key) const;
  void put(const std::string& key, const EmbeddingVector& vec);
  std::size_t size() const;

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
};

// HTTP JSON embedding client. Request {model, input}, response
// {embedding: [..]}. Bearer auth from the configured environment variable,
// bounded retries with linear backoff, bounded in-flight concurrency.
class RemoteHttpEmbedder final : public Embedder {
 public:
  explicit RemoteHttpEmbedder(const EmbedderConfig& config);
  ~RemoteHttpEmbedder() override;

  EmbeddingVector embed(const std::string& text) override;
  std::string id() const override;

  // Number of HTTP requests issued (including retries); observable so tests
  // can assert cache behavior.
  std::size_t request_count() const { return requests_.load(); }

 private:
  struct Gate;
  EmbedderConfig config_;
  std::atomic<std::size_t> requests_{0};
  std::unique_ptr<Gate> gate_;
};

// Wraps any embedder with a persistent cache keyed by
// (provider id, content hash).
class CachingEmbedder final : public Embedder {
 public:
  CachingEmbedder(std::shared_ptr<Embedder> inner, std::shared_ptr<EmbeddingCache> cache);

  EmbeddingVector embed(const std::string& text) override;
  std::string id() const override;

  static std::string cache_key(const std::string& provider_id, const std::string& text);

 private:
  std::shared_ptr<Embedder> inner_;
  std::shared_ptr<EmbeddingCache> cache_;
};

// Builds the embedder described by the config, wiring in the cache when a
// cache path is set.
std::shared_ptr<Embedder> make_embedder(const EmbedderConfig& config,
                                        TokenizerConfig tokenizer = {});

}  // namespace stylediv
