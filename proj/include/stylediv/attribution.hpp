#pragma once

#include <span>
#include <string>
#include <vector>

#include "stylediv/dataset.hpp"
#include "stylediv/embedding.hpp"
#include "stylediv/features.hpp"
#include "stylediv/gbdt.hpp"
#include "stylediv/rewriter.hpp"

namespace stylediv {

struct TokenSpan {
  std::size_t begin = 0;  // inclusive token index
  std::size_t end = 0;    // exclusive

  std::size_t length() const noexcept { return end - begin; }
};

// Greedy partition into consecutive spans of at most max_tokens, cutting at
// the last sentence-ending token (. ! ?) inside a full window when one
// exists. Spans cover the sequence exactly, in order.
std::vector<TokenSpan> segment_tokens(std::span<const std::string> tokens,
                                      std::size_t max_tokens);

// Everything needed to score a piece of text end to end.
struct ScoringPipeline {
  FeatureConfig features;
  std::vector<RewritePrompt> prompts;
  RewriteProvider* rewriter = nullptr;
  Embedder* embedder = nullptr;
  RewriteCache* rewrite_cache = nullptr;
  const TreeEnsemble* model = nullptr;
  double tau = 0.5;
  unsigned max_workers = 1;

  // Rewrite -> featurize -> predict probability for one text.
  double score_text(const std::string& id, const std::string& text) const;
};

struct SegmentScore {
  TokenSpan span;
  double probability = 0.0;
  bool failed = false;
  std::string error;
};

struct SegmentAttribution {
  std::string document_id;
  std::vector<SegmentScore> segments;
  double aggregate = 0.0;  // mean of scored segments (max behind the flag)
};

// Scores consecutive token spans of the document through the full pipeline.
// Failed segments are reported in place; remaining spans are still scored.
SegmentAttribution attribute_segments(const Document& doc,
                                      const ScoringPipeline& pipeline,
                                      std::size_t max_tokens = 64,
                                      bool aggregate_max = false);

}  // namespace stylediv
