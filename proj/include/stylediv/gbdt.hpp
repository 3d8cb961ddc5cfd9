#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stylediv {

// Node of a regression tree, arena-indexed. Internal nodes route
// value < threshold to `left`, value >= threshold to `right`.
struct TreeNode {
  bool leaf = true;
  double weight = 0.0;   // leaf payload
  int feature = -1;      // split payload
  double threshold = 0.0;
  int left = -1;
  int right = -1;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double eval(std::span<const double> x) const;
  std::size_t leaf_count() const;
};

// Additive logit model: base_logit + learning_rate * sum_k tree_k(x).
struct TreeEnsemble {
  double base_logit = 0.0;
  double learning_rate = 0.1;
  std::size_t feature_dim = 0;
  std::vector<Tree> trees;
};

struct TrainConfig {
  int rounds = 100;
  double learning_rate = 0.1;  // in (0, 1]
  int max_depth = 4;
  double lambda = 1.0;  // L2 penalty on leaf weights, >= 0
  double gamma = 0.0;   // per-leaf complexity penalty / split margin, >= 0
  int min_samples_leaf = 2;
  std::uint64_t seed = 0;
};

double sigmoid(double logit);

// Per-sample logistic log-loss at a raw logit, numerically stable.
double logloss(int label, double logit);

// First/second derivatives of the logistic log-loss w.r.t. the logit:
// g = sigmoid(logit) - y, h = sigmoid(logit) * (1 - sigmoid(logit)).
std::pair<double, double> grad_hess(int label, double logit);

// Closed-form minimizer of g*w + 0.5*(h + lambda)*w^2: w* = -G / (H + lambda).
// Throws std::invalid_argument when H + lambda == 0.
double leaf_weight(double grad_sum, double hess_sum, double lambda);

// Structure-score improvement of a candidate split minus gamma.
double split_gain(double grad_left, double hess_left, double grad_right,
                  double hess_right, double lambda, double gamma);

// Trains `config.rounds` trees by exact greedy split search on the
// per-sample gradients/hessians of the logistic loss. Deterministic:
// candidate thresholds are midpoints between consecutive distinct feature
// values, ties broken toward the lowest feature index, then lowest
// threshold. When `round_losses` is given it receives the total training
// log-loss before any round and after each round (rounds + 1 entries).
TreeEnsemble train(const std::vector<std::vector<double>>& rows,
                   const std::vector<int>& labels, const TrainConfig& config,
                   std::vector<double>* round_losses = nullptr);

double predict_logit(const TreeEnsemble& ensemble, std::span<const double> x);

struct Prediction {
  double probability = 0.0;
  int label = 0;
};

// p = sigmoid(logit); label = 1 iff p > tau (strict). tau must be in (0, 1).
Prediction predict_label(const TreeEnsemble& ensemble, std::span<const double> x,
                         double tau);

// Versioned JSON model file with explicit node lists. Round-trips
// reproduce predictions bit-exactly. `config_hash` is stamped into the file
// and surfaced on load for artifact compatibility checks.
void save_model(const std::string& path, const TreeEnsemble& ensemble,
                const std::string& config_hash = {});
TreeEnsemble load_model(const std::string& path,
                        std::string* config_hash = nullptr);

inline constexpr const char* kModelFormatVersion = "stylediv-gbdt-v1";

}  // namespace stylediv
