#include "stylediv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stylediv {

namespace {

void check_binary(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("scores/labels size mismatch");
  }
  if (scores.empty()) throw std::invalid_argument("empty inputs");
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) {
    if (y == 1) {
      has_pos = true;
    } else if (y == 0) {
      has_neg = true;
    } else {
      throw std::invalid_argument("labels must be 0 or 1");
    }
  }
  if (!has_pos || !has_neg) {
    throw std::invalid_argument("both classes must be present");
  }
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  check_binary(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mid-rank assignment over tie groups, ranks are 1-based.
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double mid_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum_pos += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  std::size_t n_neg = n - n_pos;
  double u = rank_sum_pos -
             static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

F1Sweep best_f1_sweep(std::span<const double> scores, std::span<const int> labels) {
  check_binary(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  long total_pos = 0;
  for (int y : labels) total_pos += y;
  long total_neg = static_cast<long>(n) - total_pos;

  // Finite sentinels outside the score range stand in for -inf / +inf so
  // thresholds stay representable in JSON reports.
  double low_sentinel = scores[order.front()] - 1.0;
  double high_sentinel = scores[order.back()] + 1.0;

  // Predicted positive iff score > threshold. Start below the minimum
  // (everything positive) and flip tie groups to negative as the threshold
  // passes them.
  long tp = total_pos;
  long fp = total_neg;
  F1Sweep best;
  best.f1 = -1.0;

  auto consider = [&](double threshold) {
    long fn = total_pos - tp;
    double denom = static_cast<double>(2 * tp + fp + fn);
    double f1 = denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    if (f1 >= best.f1) {  // >= keeps the larger threshold on ties
      best.f1 = f1;
      best.threshold = threshold;
      best.confusion = Confusion{tp, fp, total_neg - fp, fn};
    }
  };

  consider(low_sentinel);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        --tp;
      } else {
        --fp;
      }
    }
    double threshold = j < n
                           ? 0.5 * (scores[order[j - 1]] + scores[order[j]])
                           : high_sentinel;
    consider(threshold);
    i = j;
  }
  return best;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    total += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(total, 0.0);
}

double hellinger_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("hellinger: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    sum += d * d;
  }
  return std::clamp(std::sqrt(0.5 * sum), 0.0, 1.0);
}

DivergencePair histogram_divergences(std::span<const double> p_samples,
                                     std::span<const double> q_samples,
                                     int bins, double epsilon) {
  if (p_samples.empty() || q_samples.empty()) {
    throw std::invalid_argument("histogram_divergences: empty class sample set");
  }
  if (bins < 2) throw std::invalid_argument("histogram_divergences: bins must be >= 2");
  if (epsilon < 0.0) {
    throw std::invalid_argument("histogram_divergences: epsilon must be >= 0");
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : p_samples) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : q_samples) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) return DivergencePair{0.0, 0.0};  // all values identical

  const std::size_t b = static_cast<std::size_t>(bins);
  auto histogram = [&](std::span<const double> samples) {
    std::vector<double> h(b, 0.0);
    for (double v : samples) {
      auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(b));
      if (idx >= b) idx = b - 1;
      h[idx] += 1.0;
    }
    double total = static_cast<double>(samples.size()) + epsilon * static_cast<double>(b);
    for (double& x : h) x = (x + epsilon) / total;
    return h;
  };

  std::vector<double> p = histogram(p_samples);
  std::vector<double> q = histogram(q_samples);
  return DivergencePair{kl_divergence(p, q), hellinger_distance(p, q)};
}

EvalReport evaluate_scores(std::span<const double> scores,
                           std::span<const int> labels,
                           const std::vector<std::vector<double>>& features,
                           int bins, double epsilon) {
  check_binary(scores, labels);
  EvalReport report;
  report.auroc = auroc(scores, labels);
  F1Sweep sweep = best_f1_sweep(scores, labels);
  report.best_f1 = sweep.f1;
  report.best_threshold = sweep.threshold;
  report.confusion = sweep.confusion;
  for (int y : labels) (y == 1 ? report.n_pos : report.n_neg) += 1;

  report.divergences.bin_count = bins;
  report.divergences.epsilon = epsilon;

  std::vector<double> pos_scores;
  std::vector<double> neg_scores;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    (labels[i] == 1 ? pos_scores : neg_scores).push_back(scores[i]);
  }
  DivergencePair score_div =
      histogram_divergences(pos_scores, neg_scores, bins, epsilon);
  report.divergences.kl_score = score_div.kl;
  report.divergences.hellinger_score = score_div.hellinger;

  if (!features.empty()) {
    if (features.size() != scores.size()) {
      throw std::invalid_argument("evaluate_scores: features/scores size mismatch");
    }
    const std::size_t dim = features.front().size();
    double kl_sum = 0.0;
    double hellinger_sum = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      std::vector<double> pos;
      std::vector<double> neg;
      for (std::size_t i = 0; i < features.size(); ++i) {
        (labels[i] == 1 ? pos : neg).push_back(features[i][d]);
      }
      DivergencePair pair = histogram_divergences(pos, neg, bins, epsilon);
      report.divergences.per_dimension.push_back(pair);
      kl_sum += pair.kl;
      hellinger_sum += pair.hellinger;
    }
    report.divergences.kl_feature = kl_sum / static_cast<double>(dim);
    report.divergences.hellinger_feature = hellinger_sum / static_cast<double>(dim);
  }
  return report;
}

}  // namespace stylediv
