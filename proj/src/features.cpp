#include "stylediv/features.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "stylediv/errors.hpp"

namespace stylediv {

using nlohmann::json;

StyleFeatureVector fuse(const std::vector<DiscreteStyleBlock>& discrete,
                        const std::vector<double>& continuous, double alpha,
                        double beta) {
  if (discrete.empty() || discrete.size() != continuous.size()) {
    throw std::invalid_argument(
        "fuse: discrete/continuous blocks must have equal non-zero length");
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::invalid_argument("fuse: alpha and beta must be finite");
  }

  StyleFeatureVector out;
  out.alpha = alpha;
  out.beta = beta;
  out.blocks.reserve(discrete.size());
  out.flattened.reserve(3 * discrete.size());
  for (std::size_t i = 0; i < discrete.size(); ++i) {
    if (!std::isfinite(discrete[i].v_n) || !std::isfinite(discrete[i].v_edit) ||
        !std::isfinite(continuous[i])) {
      throw std::invalid_argument("fuse: non-finite feature input");
    }
    RewriteFeatureBlock block;
    block.v_n = discrete[i].v_n;
    block.v_edit = discrete[i].v_edit;
    block.v_c = continuous[i];
    out.blocks.push_back(block);
    out.flattened.push_back(alpha * block.v_n);
    out.flattened.push_back(alpha * block.v_edit);
    out.flattened.push_back(beta * block.v_c);
  }
  return out;
}

StyleFeatureVector featurize(const Document& doc, const RewriteSet& rewrites,
                             const FeatureConfig& config, Embedder& embedder) {
  if (rewrites.rewrites.empty()) {
    throw std::invalid_argument("featurize: rewrite set is empty");
  }

  try {
    TokenSequence original = tokenize(doc.text, config.tokenizer);
    EmbeddingVector original_vec = embedder.embed(doc.text);

    std::vector<DiscreteStyleBlock> discrete;
    std::vector<double> continuous;
    std::vector<bool> degenerate;
    discrete.reserve(rewrites.rewrites.size());
    continuous.reserve(rewrites.rewrites.size());
    for (const auto& [prompt_id, text] : rewrites.rewrites) {
      TokenSequence rewritten = tokenize(text, config.tokenizer);
      discrete.push_back(discrete_block(original, rewritten, config.n1, config.n2,
                                        OverlapConfig{config.normalize_overlap},
                                        config.granularity));
      StabilityScore stability = cosine_stability(original_vec, embedder.embed(text));
      continuous.push_back(stability.value);
      degenerate.push_back(stability.degenerate);
    }

    if (config.average_rewrites) {
      DiscreteStyleBlock mean_block{0.0, 0.0};
      double mean_cos = 0.0;
      bool any_degenerate = false;
      auto k = static_cast<double>(discrete.size());
      for (std::size_t i = 0; i < discrete.size(); ++i) {
        mean_block.v_n += discrete[i].v_n / k;
        mean_block.v_edit += discrete[i].v_edit / k;
        mean_cos += continuous[i] / k;
        any_degenerate = any_degenerate || degenerate[i];
      }
      discrete = {mean_block};
      continuous = {mean_cos};
      degenerate = {any_degenerate};
    }

    StyleFeatureVector out = fuse(discrete, continuous, config.alpha, config.beta);
    out.document_id = doc.id;
    for (std::size_t i = 0; i < out.blocks.size(); ++i) {
      out.blocks[i].cosine_degenerate = degenerate[i];
    }
    return out;
  } catch (const ProviderError& e) {
    throw ProviderError(e.what(), doc.id);
  }
}

void save_feature_matrix(const std::string& path, const FeatureMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_feature_matrix: cannot open '" + path + "'");
  json meta{{"meta",
             {{"config_hash", matrix.config_hash},
              {"prompt_ids", matrix.prompt_ids},
              {"n1", matrix.n1},
              {"n2", matrix.n2},
              {"alpha", matrix.alpha},
              {"beta", matrix.beta}}}};
  out << meta.dump() << '\n';
  for (const FeatureMatrix::Row& row : matrix.rows) {
    json record{{"document_id", row.document_id}, {"flattened", row.flattened}};
    if (row.label) record["label"] = *row.label;
    out << record.dump() << '\n';
  }
}

FeatureMatrix load_feature_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_feature_matrix: cannot open '" + path + "'");

  FeatureMatrix matrix;
  std::string line;
  std::size_t line_no = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("feature matrix '" + path + "' line " + std::to_string(line_no) +
                  ": " + e.what());
    }
    if (!have_meta) {
      if (!record.contains("meta")) {
        throw Error("feature matrix '" + path + "': missing leading meta record");
      }
      const json& meta = record["meta"];
      matrix.config_hash = meta.value("config_hash", std::string{});
      matrix.prompt_ids = meta.value("prompt_ids", std::vector<std::string>{});
      matrix.n1 = meta.value("n1", std::size_t{1});
      matrix.n2 = meta.value("n2", std::size_t{4});
      matrix.alpha = meta.value("alpha", 1.0);
      matrix.beta = meta.value("beta", 1.0);
      have_meta = true;
      continue;
    }
    FeatureMatrix::Row row;
    try {
      row.document_id = record.at("document_id").get<std::string>();
      row.flattened = record.at("flattened").get<std::vector<double>>();
      if (record.contains("label") && !record["label"].is_null()) {
        row.label = record["label"].get<int>();
      }
    } catch (const json::exception& e) {
      throw Error("feature matrix '" + path + "' line " + std::to_string(line_no) +
                  ": " + e.what());
    }
    matrix.rows.push_back(std::move(row));
  }
  if (!have_meta) {
    throw Error("feature matrix '" + path + "': empty file");
  }
  return matrix;
}

}  // namespace stylediv
