#include "stylediv/attribution.hpp"

#include <stdexcept>

#include "stylediv/errors.hpp"
#include "stylediv/util.hpp"

namespace stylediv {

namespace {

bool ends_sentence(const std::string& token) {
  return token == "." || token == "!" || token == "?";
}

}  // namespace

std::vector<TokenSpan> segment_tokens(std::span<const std::string> tokens,
                                      std::size_t max_tokens) {
  if (max_tokens == 0) throw std::invalid_argument("segment_tokens: max_tokens must be >= 1");
  std::vector<TokenSpan> spans;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    std::size_t end = std::min(pos + max_tokens, tokens.size());
    if (end < tokens.size()) {
      // Prefer the last sentence boundary inside the window.
      for (std::size_t j = end; j > pos; --j) {
        if (ends_sentence(tokens[j - 1])) {
          end = j;
          break;
        }
      }
    }
    spans.push_back(TokenSpan{pos, end});
    pos = end;
  }
  return spans;
}

double ScoringPipeline::score_text(const std::string& id,
                                   const std::string& text) const {
  if (!rewriter || !embedder || !model) {
    throw ConfigError("scoring pipeline is missing a provider or model");
  }
  Document doc{id, text, std::nullopt, std::nullopt};
  RewriteSet rewrites = rewrite(doc, prompts, *rewriter, rewrite_cache);
  StyleFeatureVector vec = featurize(doc, rewrites, features, *embedder);
  return sigmoid(predict_logit(*model, vec.flattened));
}

SegmentAttribution attribute_segments(const Document& doc,
                                      const ScoringPipeline& pipeline,
                                      std::size_t max_tokens,
                                      bool aggregate_max) {
  TokenSequence seq = tokenize(doc.text, pipeline.features.tokenizer);
  if (seq.empty()) throw std::invalid_argument("attribute_segments: empty document");

  std::vector<TokenSpan> spans = segment_tokens(seq.tokens, max_tokens);
  SegmentAttribution out;
  out.document_id = doc.id;
  out.segments.resize(spans.size());

  parallel_for(spans.size(), pipeline.max_workers, [&](std::size_t i) {
    SegmentScore& score = out.segments[i];
    score.span = spans[i];
    std::string segment_text =
        detokenize(std::span<const std::string>(seq.tokens)
                       .subspan(spans[i].begin, spans[i].length()));
    std::string segment_id = doc.id + "#" + std::to_string(i);
    try {
      score.probability = pipeline.score_text(segment_id, segment_text);
    } catch (const std::exception& e) {
      score.failed = true;
      score.error = e.what();
    }
  });

  double sum = 0.0;
  double best = 0.0;
  std::size_t scored = 0;
  for (const SegmentScore& s : out.segments) {
    if (s.failed) continue;
    sum += s.probability;
    best = std::max(best, s.probability);
    ++scored;
  }
  if (scored == 0) {
    throw RewriteError(doc.id, {"<all segments failed>"});
  }
  out.aggregate = aggregate_max ? best : sum / static_cast<double>(scored);
  return out;
}

}  // namespace stylediv
