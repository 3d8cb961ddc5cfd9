#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stylediv/attribution.hpp"
#include "stylediv/config.hpp"
#include "stylediv/dataset.hpp"
#include "stylediv/features.hpp"
#include "stylediv/gbdt.hpp"
#include "stylediv/metrics.hpp"

namespace stylediv {

// Providers and caches materialized from a config. Build once per command.
class PipelineRuntime {
 public:
  explicit PipelineRuntime(PipelineConfig config);

  const PipelineConfig& config() const noexcept { return config_; }
  const std::string& hash() const noexcept { return hash_; }

  RewriteProvider& rewriter() { return *rewriter_; }
  Embedder& embedder() { return *embedder_; }
  RewriteCache* rewrite_cache() { return rewrite_cache_.get(); }

  ScoringPipeline scoring(const TreeEnsemble& model) const;

 private:
  PipelineConfig config_;
  std::string hash_;
  std::unique_ptr<RewriteProvider> rewriter_;
  std::shared_ptr<Embedder> embedder_;
  std::unique_ptr<RewriteCache> rewrite_cache_;
};

// Rewrites every document (cache-first), in deterministic document order.
std::vector<RewriteSet> run_rewrite(PipelineRuntime& runtime,
                                    std::span<const Document> docs);

void save_rewrites(const std::string& path, const std::string& config_hash,
                   std::span<const std::string> prompt_ids,
                   std::span<const RewriteSet> sets);
std::vector<RewriteSet> load_rewrites(const std::string& path,
                                      std::string* config_hash = nullptr);

// Featurizes a corpus; when `precomputed` is non-null its rewrites are used
// instead of calling the rewrite provider.
FeatureMatrix run_featurize(PipelineRuntime& runtime, std::span<const Document> docs,
                            const std::vector<RewriteSet>* precomputed = nullptr);

// Trains on a labeled feature matrix; refuses matrices whose config hash
// differs from the runtime's.
TreeEnsemble run_train(PipelineRuntime& runtime, const FeatureMatrix& matrix,
                       std::vector<double>* round_losses = nullptr);

struct Detection {
  std::string id;
  double probability = 0.0;
  int label = 0;
};

std::vector<Detection> run_detect(PipelineRuntime& runtime,
                                  std::span<const Document> docs,
                                  const TreeEnsemble& model,
                                  const std::string& model_hash);

void save_detections(const std::string& path, const std::string& config_hash,
                     double tau, std::span<const Detection> detections);

struct EvalOutput {
  EvalReport report;
  std::vector<Detection> detections;
  FeatureMatrix features;
};

EvalOutput run_evaluate(PipelineRuntime& runtime, std::span<const Document> docs,
                        const TreeEnsemble& model, const std::string& model_hash);

void save_report(const std::string& path, const std::string& config_hash,
                 const EvalOutput& output,
                 std::span<const SegmentAttribution> segments = {});

// Per-document feature/score table for external plotting.
void save_score_table_csv(const std::string& path, const EvalOutput& output);

std::vector<SegmentAttribution> run_attribute(PipelineRuntime& runtime,
                                              std::span<const Document> docs,
                                              const TreeEnsemble& model,
                                              const std::string& model_hash);

void save_attributions(const std::string& path, const std::string& config_hash,
                       std::span<const SegmentAttribution> attributions);

}  // namespace stylediv
