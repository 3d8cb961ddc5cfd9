#include "stylediv/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "stylediv/errors.hpp"

namespace stylediv {

using nlohmann::json;

double Tree::eval(std::span<const double> x) const {
  int idx = 0;
  while (!nodes[static_cast<std::size_t>(idx)].leaf) {
    const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
    idx = x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                     : node.right;
  }
  return nodes[static_cast<std::size_t>(idx)].weight;
}

std::size_t Tree::leaf_count() const {
  std::size_t count = 0;
  for (const auto& n : nodes) count += n.leaf ? 1 : 0;
  return count;
}

double sigmoid(double logit) {
  if (logit >= 0.0) {
    return 1.0 / (1.0 + std::exp(-logit));
  }
  double e = std::exp(logit);
  return e / (1.0 + e);
}

double logloss(int label, double logit) {
  // log(1 + e^z) - y*z, evaluated without overflow.
  return std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit))) -
         static_cast<double>(label) * logit;
}

std::pair<double, double> grad_hess(int label, double logit) {
  double p = sigmoid(logit);
  return {p - static_cast<double>(label), p * (1.0 - p)};
}

double leaf_weight(double grad_sum, double hess_sum, double lambda) {
  double denom = hess_sum + lambda;
  if (denom <= 0.0) {
    throw std::invalid_argument("leaf_weight: H + lambda must be positive");
  }
  return -grad_sum / denom;
}

double split_gain(double grad_left, double hess_left, double grad_right,
                  double hess_right, double lambda, double gamma) {
  auto score = [lambda](double g, double h) { return g * g / (h + lambda); };
  return 0.5 * (score(grad_left, hess_left) + score(grad_right, hess_right) -
                score(grad_left + grad_right, hess_left + hess_right)) -
         gamma;
}

namespace {

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

struct TreeBuilder {
  const std::vector<std::vector<double>>& rows;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  const TrainConfig& config;
  Tree tree;

  int build(std::vector<std::size_t>& samples, int depth) {
    double g_sum = 0.0;
    double h_sum = 0.0;
    for (std::size_t i : samples) {
      g_sum += grad[i];
      h_sum += hess[i];
    }

    SplitChoice best;
    if (depth < config.max_depth &&
        samples.size() >= 2 * static_cast<std::size_t>(config.min_samples_leaf)) {
      best = find_split(samples);
    }

    int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (!best.found) {
      TreeNode& node = tree.nodes.back();
      node.leaf = true;
      double denom = h_sum + config.lambda;
      node.weight = denom > 0.0 ? -g_sum / denom : 0.0;
      return index;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    for (std::size_t i : samples) {
      if (rows[i][static_cast<std::size_t>(best.feature)] < best.threshold) {
        left.push_back(i);
      } else {
        right.push_back(i);
      }
    }
    samples.clear();
    samples.shrink_to_fit();

    int left_index = build(left, depth + 1);
    int right_index = build(right, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    node.leaf = false;
    node.weight = 0.0;
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_index;
    node.right = right_index;
    return index;
  }

  SplitChoice find_split(const std::vector<std::size_t>& samples) {
    const std::size_t dim = rows.front().size();
    const std::size_t min_leaf = static_cast<std::size_t>(config.min_samples_leaf);

    double g_total = 0.0;
    double h_total = 0.0;
    for (std::size_t i : samples) {
      g_total += grad[i];
      h_total += hess[i];
    }

    SplitChoice best;
    std::vector<std::pair<double, std::size_t>> order(samples.size());
    for (std::size_t f = 0; f < dim; ++f) {
      for (std::size_t k = 0; k < samples.size(); ++k) {
        order[k] = {rows[samples[k]][f], samples[k]};
      }
      std::sort(order.begin(), order.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double g_left = 0.0;
      double h_left = 0.0;
      std::size_t count_left = 0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        g_left += grad[order[k].second];
        h_left += hess[order[k].second];
        ++count_left;
        if (order[k].first == order[k + 1].first) continue;  // not a boundary
        if (count_left < min_leaf || order.size() - count_left < min_leaf) continue;
        double threshold = 0.5 * (order[k].first + order[k + 1].first);
        double gain = split_gain(g_left, h_left, g_total - g_left,
                                 h_total - h_left, config.lambda, config.gamma);
        // Strict improvement keeps the first (lowest feature index, lowest
        // threshold) candidate on ties.
        if (gain > 0.0 && (!best.found || gain > best.gain)) {
          best.found = true;
          best.feature = static_cast<int>(f);
          best.threshold = threshold;
          best.gain = gain;
        }
      }
    }
    return best;
  }
};

void validate_training_inputs(const std::vector<std::vector<double>>& rows,
                              const std::vector<int>& labels,
                              const TrainConfig& config) {
  if (rows.empty()) throw std::invalid_argument("train: empty feature matrix");
  if (rows.size() != labels.size()) {
    throw std::invalid_argument("train: rows/labels size mismatch");
  }
  if (config.rounds < 1) throw std::invalid_argument("train: rounds must be >= 1");
  if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0)) {
    throw std::invalid_argument("train: learning_rate must be in (0, 1]");
  }
  if (config.max_depth < 1) throw std::invalid_argument("train: max_depth must be >= 1");
  if (config.lambda < 0.0 || config.gamma < 0.0) {
    throw std::invalid_argument("train: lambda and gamma must be >= 0");
  }
  if (config.min_samples_leaf < 1) {
    throw std::invalid_argument("train: min_samples_leaf must be >= 1");
  }
  const std::size_t dim = rows.front().size();
  if (dim == 0) throw std::invalid_argument("train: zero-dimensional features");
  bool has_pos = false;
  bool has_neg = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw std::invalid_argument("train: inconsistent feature dimension");
    }
    for (double v : rows[i]) {
      if (!std::isfinite(v)) throw std::invalid_argument("train: non-finite feature");
    }
    if (labels[i] == 1) {
      has_pos = true;
    } else if (labels[i] == 0) {
      has_neg = true;
    } else {
      throw std::invalid_argument("train: labels must be 0 or 1");
    }
  }
  if (!has_pos || !has_neg) {
    throw std::invalid_argument("train: both classes must be present");
  }
}

double total_logloss(const std::vector<int>& labels,
                     const std::vector<double>& logits) {
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += logloss(labels[i], logits[i]);
  }
  return total;
}

}  // namespace

TreeEnsemble train(const std::vector<std::vector<double>>& rows,
                   const std::vector<int>& labels, const TrainConfig& config,
                   std::vector<double>* round_losses) {
  validate_training_inputs(rows, labels, config);

  const std::size_t n = rows.size();
  TreeEnsemble ensemble;
  ensemble.base_logit = 0.0;
  ensemble.learning_rate = config.learning_rate;
  ensemble.feature_dim = rows.front().size();
  ensemble.trees.reserve(static_cast<std::size_t>(config.rounds));

  std::vector<double> logits(n, ensemble.base_logit);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  if (round_losses) {
    round_losses->clear();
    round_losses->push_back(total_logloss(labels, logits));
  }

  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      auto [g, h] = grad_hess(labels[i], logits[i]);
      grad[i] = g;
      hess[i] = h;
    }

    TreeBuilder builder{rows, grad, hess, config, {}};
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    builder.build(all, 0);
    Tree tree = std::move(builder.tree);

    for (std::size_t i = 0; i < n; ++i) {
      logits[i] += config.learning_rate * tree.eval(rows[i]);
    }
    ensemble.trees.push_back(std::move(tree));
    if (round_losses) round_losses->push_back(total_logloss(labels, logits));
  }
  return ensemble;
}

double predict_logit(const TreeEnsemble& ensemble, std::span<const double> x) {
  if (x.size() != ensemble.feature_dim) {
    throw std::invalid_argument("predict_logit: feature dimension mismatch");
  }
  double sum = 0.0;
  for (const Tree& tree : ensemble.trees) sum += tree.eval(x);
  return ensemble.base_logit + ensemble.learning_rate * sum;
}

Prediction predict_label(const TreeEnsemble& ensemble, std::span<const double> x,
                         double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("predict_label: tau must be in (0, 1)");
  }
  double p = sigmoid(predict_logit(ensemble, x));
  return Prediction{p, p > tau ? 1 : 0};
}

void save_model(const std::string& path, const TreeEnsemble& ensemble,
                const std::string& config_hash) {
  json doc;
  doc["version"] = kModelFormatVersion;
  doc["base_logit"] = ensemble.base_logit;
  doc["learning_rate"] = ensemble.learning_rate;
  doc["feature_dim"] = ensemble.feature_dim;
  if (!config_hash.empty()) doc["config_hash"] = config_hash;
  json trees = json::array();
  for (const Tree& tree : ensemble.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
      if (node.leaf) {
        nodes.push_back({{"type", "leaf"}, {"weight", node.weight}});
      } else {
        nodes.push_back({{"type", "split"},
                         {"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  doc["trees"] = std::move(trees);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_model: cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
}

TreeEnsemble load_model(const std::string& path, std::string* config_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("load_model: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ModelFormatError("load_model: malformed JSON in '" + path + "': " + e.what());
  }

  if (!doc.contains("version") || !doc["version"].is_string()) {
    throw ModelVersionError("load_model: missing version tag");
  }
  if (doc["version"].get<std::string>() != kModelFormatVersion) {
    throw ModelVersionError("load_model: unsupported model version '" +
                            doc["version"].get<std::string>() + "'");
  }

  try {
    TreeEnsemble ensemble;
    ensemble.base_logit = doc.at("base_logit").get<double>();
    ensemble.learning_rate = doc.at("learning_rate").get<double>();
    ensemble.feature_dim = doc.at("feature_dim").get<std::size_t>();
    if (config_hash) *config_hash = doc.value("config_hash", std::string{});
    for (const json& jt : doc.at("trees")) {
      Tree tree;
      for (const json& jn : jt.at("nodes")) {
        TreeNode node;
        std::string type = jn.at("type").get<std::string>();
        if (type == "leaf") {
          node.leaf = true;
          node.weight = jn.at("weight").get<double>();
        } else if (type == "split") {
          node.leaf = false;
          node.feature = jn.at("feature").get<int>();
          node.threshold = jn.at("threshold").get<double>();
          node.left = jn.at("left").get<int>();
          node.right = jn.at("right").get<int>();
        } else {
          throw ModelFormatError("load_model: unknown node type '" + type + "'");
        }
        tree.nodes.push_back(node);
      }
      if (tree.nodes.empty()) {
        throw ModelFormatError("load_model: tree with no nodes");
      }
      ensemble.trees.push_back(std::move(tree));
    }
    return ensemble;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("load_model: invalid model file: ") + e.what());
  }
}

}  // namespace stylediv
