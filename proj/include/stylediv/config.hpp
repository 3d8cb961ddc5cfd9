#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stylediv/embedding.hpp"
#include "stylediv/features.hpp"
#include "stylediv/gbdt.hpp"
#include "stylediv/rewriter.hpp"

namespace stylediv {

enum class RewriterKind { deterministic, remote_http };

struct RewriterSettings {
  RewriterKind kind = RewriterKind::deterministic;
  DeterministicRewriterConfig deterministic;
  RemoteRewriterConfig remote;
  unsigned max_workers = 4;
};

struct AttributionSettings {
  std::size_t max_tokens = 64;
  bool aggregate_max = false;
};

struct PipelinePaths {
  std::string rewrite_cache;
  std::string embedding_cache;
};

struct PipelineConfig {
  FeatureConfig features;  // includes the tokenizer settings
  std::vector<RewritePrompt> prompts = default_prompts();
  RewriterSettings rewriter;
  EmbedderConfig embedding;
  TrainConfig train;
  double tau = 0.5;
  std::uint64_t seed = 0;
  PipelinePaths paths;
  AttributionSettings attribution;
};

PipelineConfig default_config();

// Loads a JSON config file; unknown keys are rejected, missing keys keep
// their defaults. Auth tokens never live in the file: the config names
// environment variables instead.
PipelineConfig load_config(const std::string& path);
void save_config(const std::string& path, const PipelineConfig& config);

// Canonical serialization of everything that changes pipeline outputs
// (tokenizer, features, prompts, provider identities and seeds, training).
// Runtime-only knobs such as tau, paths, timeouts and worker counts are
// excluded so that re-running with a different threshold still matches a
// trained model.
std::string canonical_config(const PipelineConfig& config);

// Hash stamped into every artifact; artifacts combined in one command must
// carry equal hashes.
std::string config_hash(const PipelineConfig& config);

}  // namespace stylediv
