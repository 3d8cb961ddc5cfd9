#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stylediv/dataset.hpp"
#include "stylediv/embedding.hpp"
#include "stylediv/rewriter.hpp"
#include "stylediv/textops.hpp"

namespace stylediv {

struct FeatureConfig {
  std::size_t n1 = 1;
  std::size_t n2 = 4;
  double alpha = 1.0;
  double beta = 1.0;
  bool normalize_overlap = false;
  EditGranularity granularity = EditGranularity::word;
  // Concatenate one block per rewrite (default) or average blocks into one.
  bool average_rewrites = false;
  TokenizerConfig tokenizer;
};

// One (v_n, v_edit, v_c) triple per rewrite.
struct RewriteFeatureBlock {
  double v_n = 0.0;
  double v_edit = 0.0;
  double v_c = 0.0;
  bool cosine_degenerate = false;
};

struct StyleFeatureVector {
  std::string document_id;
  std::vector<RewriteFeatureBlock> blocks;
  double alpha = 1.0;
  double beta = 1.0;
  // Concatenation over rewrites of (alpha*v_n, alpha*v_edit, beta*v_c).
  std::vector<double> flattened;
};

// Scales and concatenates per-rewrite triples. discrete and continuous must
// have equal non-zero length; all inputs must be finite.
StyleFeatureVector fuse(const std::vector<DiscreteStyleBlock>& discrete,
                        const std::vector<double>& continuous, double alpha,
                        double beta);

// Tokenizes the document and every rewrite, computes the discrete block and
// the embedding-stability cosine per rewrite, then fuses. Deterministic
// given the providers' outputs.
StyleFeatureVector featurize(const Document& doc, const RewriteSet& rewrites,
                             const FeatureConfig& config, Embedder& embedder);

struct FeatureMatrix {
  struct Row {
    std::string document_id;
    std::optional<int> label;
    std::vector<double> flattened;
  };

  std::string config_hash;
  std::vector<std::string> prompt_ids;
  std::size_t n1 = 1;
  std::size_t n2 = 4;
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<Row> rows;
};

// JSON-lines persistence: a leading metadata record
// {"meta": {config_hash, prompt_ids, n1, n2, alpha, beta}} followed by one
// {"document_id", "label"?, "flattened"} record per document.
void save_feature_matrix(const std::string& path, const FeatureMatrix& matrix);
FeatureMatrix load_feature_matrix(const std::string& path);

}  // namespace stylediv
