#include "stylediv/embedding.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "stylediv/errors.hpp"
#include "stylediv/util.hpp"

namespace stylediv {

using nlohmann::json;

bool EmbeddingVector::zero() const noexcept {
  for (double v : values) {
    if (v != 0.0) return false;
  }
  return true;
}

StabilityScore cosine_stability(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("cosine_stability: dimension mismatch");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return StabilityScore{0.0, true};
  double value = dot / (std::sqrt(na) * std::sqrt(nb));
  return StabilityScore{std::clamp(value, -1.0, 1.0), false};
}

std::string EmbedderConfig::id() const {
  if (kind == EmbedderKind::deterministic_local) {
    return "det-embed:dim=" + std::to_string(dim) + ":seed=" + to_hex(seed);
  }
  return "http-embed:" + model + "@" + endpoint + ":dim=" + std::to_string(dim);
}

namespace {

void validate_dim(const EmbedderConfig& config) {
  if (config.dim < 2) throw ConfigError("embedder: dim must be >= 2");
}

}  // namespace

DeterministicLocalEmbedder::DeterministicLocalEmbedder(const EmbedderConfig& config,
                                                       TokenizerConfig tokenizer)
    : config_(config), tokenizer_(tokenizer) {
  validate_dim(config_);
}

std::size_t DeterministicLocalEmbedder::bucket_of(const std::string& token,
                                                  std::uint64_t seed,
                                                  std::size_t dim) {
  std::uint64_t h = fnv1a64_mix(kFnvOffsetBasis, seed);
  h = fnv1a64(token, h);
  return static_cast<std::size_t>(h % dim);
}

EmbeddingVector DeterministicLocalEmbedder::embed(const std::string& text) {
  EmbeddingVector vec;
  vec.values.assign(config_.dim, 0.0);
  TokenSequence seq = tokenize(text, tokenizer_);
  for (const std::string& token : seq.tokens) {
    vec.values[bucket_of(token, config_.seed, config_.dim)] += 1.0;
  }
  double norm_sq = 0.0;
  for (double v : vec.values) norm_sq += v * v;
  if (norm_sq > 0.0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : vec.values) v *= inv;
  }
  return vec;  // all-zero (degenerate) for empty token streams
}

std::string DeterministicLocalEmbedder::id() const { return config_.id(); }

EmbeddingCache::EmbeddingCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;  // fresh cache
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
      EmbeddingVector vec;
      vec.values = record.at("values").get<std::vector<double>>();
      if (vec.dim() != record.at("dim").get<std::size_t>()) {
        throw Error("dim field disagrees with vector length");
      }
      entries_[record.at("key").get<std::string>()] = std::move(vec);
    } catch (const std::exception& e) {
      throw Error("embedding cache '" + path_ + "' line " +
                  std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::optional<EmbeddingVector> EmbeddingCache::get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::put(const std::string& key, const EmbeddingVector& vec) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, vec);
  if (!inserted) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error("embedding cache: cannot append to '" + path_ + "'");
  json record{{"key", key}, {"dim", vec.dim()}, {"values", vec.values}};
  out << record.dump() << '\n';
}

std::size_t EmbeddingCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

namespace {

struct ParsedUrl {
  std::string host_port;  // scheme://host:port
  std::string path;
};

ParsedUrl parse_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must look like http://host[:port]/path, got '" +
                      endpoint + "'");
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return ParsedUrl{endpoint, "/"};
  }
  return ParsedUrl{endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

std::string auth_token_from_env(const std::string& env_name) {
  if (env_name.empty()) return {};
  const char* value = std::getenv(env_name.c_str());
  return value ? std::string(value) : std::string();
}

}  // namespace

// Bounded in-flight request gate.
struct RemoteHttpEmbedder::Gate {
  explicit Gate(int limit) : remaining(limit > 0 ? limit : 1) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mutex);
    ready.wait(lock, [&] { return remaining > 0; });
    --remaining;
  }

  void release() {
    {
      std::lock_guard<std::mutex> lock(mutex);
      ++remaining;
    }
    ready.notify_one();
  }

  std::mutex mutex;
  std::condition_variable ready;
  int remaining;
};

RemoteHttpEmbedder::RemoteHttpEmbedder(const EmbedderConfig& config)
    : config_(config), gate_(std::make_unique<Gate>(config.max_in_flight)) {
  validate_dim(config_);
  if (config_.endpoint.empty()) {
    throw ConfigError("remote embedder requires an endpoint");
  }
}

RemoteHttpEmbedder::~RemoteHttpEmbedder() = default;

EmbeddingVector RemoteHttpEmbedder::embed(const std::string& text) {
  ParsedUrl url = parse_endpoint(config_.endpoint);
  json request{{"model", config_.model}, {"input", text}};
  std::string token = auth_token_from_env(config_.auth_env);

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0 && config_.retry_backoff_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.retry_backoff_ms * attempt));
    }
    gate_->acquire();
    requests_.fetch_add(1);
    httplib::Client client(url.host_port);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);
    if (!token.empty()) client.set_bearer_token_auth(token);
    auto result = client.Post(url.path, request.dump(), "application/json");
    gate_->release();

    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status != 200) {
      last_error = "status " + std::to_string(result->status);
      continue;
    }
    json response;
    try {
      response = json::parse(result->body);
      EmbeddingVector vec;
      vec.values = response.at("embedding").get<std::vector<double>>();
      if (vec.dim() != config_.dim) {
        throw ProviderError("embedding dimension " + std::to_string(vec.dim()) +
                            " does not match configured dim " +
                            std::to_string(config_.dim));
      }
      for (double v : vec.values) {
        if (!std::isfinite(v)) {
          throw ProviderError("embedding contains non-finite component");
        }
      }
      return vec;
    } catch (const json::exception& e) {
      last_error = std::string("malformed response: ") + e.what();
      continue;
    }
  }
  throw ProviderError("embedding provider unavailable after " +
                      std::to_string(config_.max_retries + 1) + " attempts (" +
                      last_error + ")");
}

std::string RemoteHttpEmbedder::id() const { return config_.id(); }

CachingEmbedder::CachingEmbedder(std::shared_ptr<Embedder> inner,
                                 std::shared_ptr<EmbeddingCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

std::string CachingEmbedder::cache_key(const std::string& provider_id,
                                       const std::string& text) {
  return provider_id + ":" + to_hex(fnv1a64(text));
}

EmbeddingVector CachingEmbedder::embed(const std::string& text) {
  std::string key = cache_key(inner_->id(), text);
  if (auto hit = cache_->get(key)) return *hit;
  EmbeddingVector vec = inner_->embed(text);
  cache_->put(key, vec);
  return vec;
}

std::string CachingEmbedder::id() const { return inner_->id(); }

std::shared_ptr<Embedder> make_embedder(const EmbedderConfig& config,
                                        TokenizerConfig tokenizer) {
  std::shared_ptr<Embedder> inner;
  if (config.kind == EmbedderKind::deterministic_local) {
    inner = std::make_shared<DeterministicLocalEmbedder>(config, tokenizer);
  } else {
    inner = std::make_shared<RemoteHttpEmbedder>(config);
  }
  if (config.cache_path.empty()) return inner;
  return std::make_shared<CachingEmbedder>(
      inner, std::make_shared<EmbeddingCache>(config.cache_path));
}

}  // namespace stylediv
