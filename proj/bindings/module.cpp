#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stylediv/embedding.hpp"
#include "stylediv/errors.hpp"
#include "stylediv/features.hpp"
#include "stylediv/gbdt.hpp"
#include "stylediv/metrics.hpp"
#include "stylediv/rewriter.hpp"
#include "stylediv/textops.hpp"

namespace py = pybind11;
using namespace stylediv;

namespace {

TokenSequence seq_of(const std::vector<std::string>& tokens) {
  TokenSequence seq;
  seq.tokens = tokens;
  return seq;
}

std::vector<double> make_style_features(const std::string& text,
                                        const std::vector<std::string>& rewrites,
                                        std::size_t n1, std::size_t n2,
                                        double alpha, double beta,
                                        bool normalize_overlap, std::size_t dim,
                                        std::uint64_t seed) {
  FeatureConfig config;
  config.n1 = n1;
  config.n2 = n2;
  config.alpha = alpha;
  config.beta = beta;
  config.normalize_overlap = normalize_overlap;

  EmbedderConfig embed_config;
  embed_config.dim = dim;
  embed_config.seed = seed;
  DeterministicLocalEmbedder embedder(embed_config, config.tokenizer);

  RewriteSet set;
  set.document_id = "py";
  for (std::size_t i = 0; i < rewrites.size(); ++i) {
    set.rewrites.emplace_back("p" + std::to_string(i), rewrites[i]);
  }
  Document doc{"py", text, std::nullopt, std::nullopt};
  return featurize(doc, set, config, embedder).flattened;
}

}  // namespace

PYBIND11_MODULE(stylediv, m) {
  m.doc() = "Stylistic rewrite-divergence toolkit: discrete/continuous style "
            "features, a second-order boosted-tree detector, and ranking "
            "metrics.";

  py::register_exception<Error>(m, "StyledivError", PyExc_RuntimeError);

  // --- text operations ----------------------------------------------------
  m.def(
      "tokenize",
      [](const std::string& text, bool lowercase) {
        return tokenize(text, TokenizerConfig{lowercase}).tokens;
      },
      py::arg("text"), py::arg("lowercase") = true,
      "Whitespace tokenization with boundary punctuation detached.");

  m.def(
      "detokenize",
      [](const std::vector<std::string>& tokens) { return detokenize(tokens); },
      py::arg("tokens"));

  m.def(
      "ngram_set",
      [](const std::vector<std::string>& tokens, std::size_t n) {
        NGramSet set = ngram_set(seq_of(tokens), n);
        std::vector<std::vector<std::string>> out(set.grams.begin(), set.grams.end());
        return out;
      },
      py::arg("tokens"), py::arg("n"),
      "Distinct contiguous n-token windows, sorted.");

  m.def(
      "ngram_overlap",
      [](const std::vector<std::string>& x, const std::vector<std::string>& x_hat,
         std::size_t n1, std::size_t n2, bool normalize) {
        return ngram_overlap_feature(seq_of(x), seq_of(x_hat), n1, n2,
                                     OverlapConfig{normalize});
      },
      py::arg("x"), py::arg("x_hat"), py::arg("n1") = 1, py::arg("n2") = 4,
      py::arg("normalize") = false,
      "Averaged n-gram overlap between two token sequences.");

  m.def(
      "edit_distance",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        return edit_distance(a, b);
      },
      py::arg("a"), py::arg("b"), "Token-level Levenshtein distance.");

  m.def(
      "edit_similarity",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        return edit_similarity_feature(seq_of(a), seq_of(b));
      },
      py::arg("a"), py::arg("b"),
      "1 - distance / max(len), in [0, 1]; both-empty pairs score 1.");

  m.def(
      "discrete_block",
      [](const std::vector<std::string>& x, const std::vector<std::string>& x_hat,
         std::size_t n1, std::size_t n2, bool normalize) {
        DiscreteStyleBlock block = discrete_block(seq_of(x), seq_of(x_hat), n1, n2,
                                                  OverlapConfig{normalize});
        return py::make_tuple(block.v_n, block.v_edit);
      },
      py::arg("x"), py::arg("x_hat"), py::arg("n1") = 1, py::arg("n2") = 4,
      py::arg("normalize") = false);

  // --- embeddings -----------------------------------------------------------
  m.def(
      "embed",
      [](const std::string& text, std::size_t dim, std::uint64_t seed) {
        EmbedderConfig config;
        config.dim = dim;
        config.seed = seed;
        return DeterministicLocalEmbedder(config).embed(text).values;
      },
      py::arg("text"), py::arg("dim") = 256,
      py::arg("seed") = EmbedderConfig{}.seed,
      "Deterministic hash-bucketed token-frequency embedding, L2-normalized.");

  m.def(
      "cosine_stability",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        StabilityScore score =
            cosine_stability(EmbeddingVector{a}, EmbeddingVector{b});
        return py::make_tuple(score.value, score.degenerate);
      },
      py::arg("a"), py::arg("b"),
      "Returns (cosine, degenerate). Zero-norm inputs score 0 with the flag set.");

  // --- deterministic rewriting ----------------------------------------------
  m.def(
      "deterministic_rewrite",
      [](const std::vector<std::string>& tokens, const std::string& rule,
         double rate, std::uint64_t seed, std::size_t window) {
        DeterministicRuleConfig config{rewrite_rule_from_string(rule), rate, window};
        return deterministic_rewrite(tokens, config, seed);
      },
      py::arg("tokens"), py::arg("rule"), py::arg("rate") = 0.0,
      py::arg("seed") = 0, py::arg("window") = 3,
      "Rules: identity, synonym-swap, shuffle-window, drop-rate.");

  // --- fused style features ---------------------------------------------------
  m.def("style_features", &make_style_features, py::arg("text"), py::arg("rewrites"),
        py::arg("n1") = 1, py::arg("n2") = 4, py::arg("alpha") = 1.0,
        py::arg("beta") = 1.0, py::arg("normalize_overlap") = false,
        py::arg("dim") = 256, py::arg("seed") = EmbedderConfig{}.seed,
        "Per-rewrite (alpha*v_n, alpha*v_edit, beta*v_c) triples, concatenated.");

  // --- boosted-tree detector ---------------------------------------------------
  m.def("grad_hess", &grad_hess, py::arg("label"), py::arg("logit"));
  m.def("leaf_weight", &leaf_weight, py::arg("grad_sum"), py::arg("hess_sum"),
        py::arg("lambda_"));
  m.def("split_gain", &split_gain, py::arg("grad_left"), py::arg("hess_left"),
        py::arg("grad_right"), py::arg("hess_right"), py::arg("lambda_"),
        py::arg("gamma"));
  m.def("sigmoid", &sigmoid, py::arg("logit"));

  py::class_<TreeEnsemble>(m, "Detector")
      .def_readonly("base_logit", &TreeEnsemble::base_logit)
      .def_readonly("learning_rate", &TreeEnsemble::learning_rate)
      .def_readonly("feature_dim", &TreeEnsemble::feature_dim)
      .def_property_readonly(
          "num_trees", [](const TreeEnsemble& e) { return e.trees.size(); })
      .def(
          "predict_logit",
          [](const TreeEnsemble& e, const std::vector<double>& x) {
            return predict_logit(e, x);
          },
          py::arg("x"))
      .def(
          "predict_proba",
          [](const TreeEnsemble& e, const std::vector<double>& x) {
            return sigmoid(predict_logit(e, x));
          },
          py::arg("x"))
      .def(
          "predict",
          [](const TreeEnsemble& e, const std::vector<double>& x, double tau) {
            return predict_label(e, x, tau).label;
          },
          py::arg("x"), py::arg("tau") = 0.5)
      .def(
          "save",
          [](const TreeEnsemble& e, const std::string& path) {
            save_model(path, e);
          },
          py::arg("path"));

  m.def(
      "train_detector",
      [](const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
         int rounds, double learning_rate, int max_depth, double lambda_,
         double gamma, int min_samples_leaf) {
        TrainConfig config;
        config.rounds = rounds;
        config.learning_rate = learning_rate;
        config.max_depth = max_depth;
        config.lambda = lambda_;
        config.gamma = gamma;
        config.min_samples_leaf = min_samples_leaf;
        return train(rows, labels, config);
      },
      py::arg("features"), py::arg("labels"), py::arg("rounds") = 100,
      py::arg("learning_rate") = 0.1, py::arg("max_depth") = 4,
      py::arg("lambda_") = 1.0, py::arg("gamma") = 0.0,
      py::arg("min_samples_leaf") = 2,
      "Second-order boosted regression trees for binary detection.");

  m.def(
      "load_detector", [](const std::string& path) { return load_model(path); },
      py::arg("path"));

  // --- metrics -------------------------------------------------------------
  m.def(
      "auroc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return auroc(scores, labels);
      },
      py::arg("scores"), py::arg("labels"),
      "Rank-based AUROC with ties counted as one half.");

  m.def(
      "best_f1",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        F1Sweep sweep = best_f1_sweep(scores, labels);
        return py::make_tuple(sweep.f1, sweep.threshold);
      },
      py::arg("scores"), py::arg("labels"),
      "Threshold-swept best F1 and the threshold achieving it.");

  m.def(
      "histogram_divergences",
      [](const std::vector<double>& pos, const std::vector<double>& neg, int bins,
         double epsilon) {
        DivergencePair pair = histogram_divergences(pos, neg, bins, epsilon);
        return py::make_tuple(pair.kl, pair.hellinger);
      },
      py::arg("positive"), py::arg("negative"), py::arg("bins") = 20,
      py::arg("epsilon") = 1e-6,
      "(KL, Hellinger) between smoothed class histograms.");
}
