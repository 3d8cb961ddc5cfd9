#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stylediv/metrics.hpp"
#include "stylediv/util.hpp"

using namespace stylediv;

namespace {

// O(n^2) pairwise AUROC oracle.
double auroc_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(pairs);
}

double f1_at(const std::vector<double>& scores, const std::vector<int>& labels,
             double threshold) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool predicted = scores[i] > threshold;
    if (predicted && labels[i] == 1) ++tp;
    if (predicted && labels[i] == 0) ++fp;
    if (!predicted && labels[i] == 1) ++fn;
  }
  double denom = static_cast<double>(2 * tp + fp + fn);
  return denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

}  // namespace

TEST_CASE("auroc on hand-worked examples") {
  CHECK(auroc(std::vector<double>{0.9, 0.8, 0.3, 0.1}, std::vector<int>{1, 1, 0, 0}) == 1.0);
  CHECK(auroc(std::vector<double>{0.9, 0.4, 0.6, 0.1}, std::vector<int>{1, 1, 0, 0}) == 0.75);
  CHECK(auroc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(auroc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}),
                  std::invalid_argument);
}

TEST_CASE("auroc equals the pairwise oracle, ties included") {
  SeededRng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 2 + rng.pick_index(199);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Quantized scores produce frequent ties.
      scores[i] = std::round(rng.unit() * 10.0) / 10.0;
      labels[i] = static_cast<int>(rng.pick_index(2));
    }
    labels[0] = 1;
    labels[1] = 0;
    CHECK(std::abs(auroc(scores, labels) - auroc_oracle(scores, labels)) <= 1e-12);
  }
}

TEST_CASE("auroc is invariant under strictly monotone transforms") {
  SeededRng rng(103);
  std::vector<double> scores(60);
  std::vector<int> labels(60);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = rng.unit();
    labels[i] = static_cast<int>(rng.pick_index(2));
  }
  labels[0] = 1;
  labels[1] = 0;
  double base = auroc(scores, labels);

  std::vector<double> transformed = scores;
  for (double& s : transformed) s = std::exp(3.0 * s) + 5.0;
  CHECK(std::abs(auroc(transformed, labels) - base) <= 1e-12);
}

TEST_CASE("best_f1_sweep finds the separating threshold") {
  F1Sweep sweep = best_f1_sweep(std::vector<double>{0.9, 0.8, 0.2},
                                std::vector<int>{1, 1, 0});
  CHECK(sweep.f1 == 1.0);
  CHECK(sweep.threshold > 0.2);
  CHECK(sweep.threshold < 0.8);
  CHECK(sweep.confusion.tp == 2);
  CHECK(sweep.confusion.fp == 0);
  CHECK(sweep.confusion.fn == 0);
  CHECK(sweep.confusion.tn == 1);
}

TEST_CASE("best_f1_sweep on inverted labels matches the brute-force sweep") {
  std::vector<double> scores = {0.9, 0.8, 0.2};
  std::vector<int> labels = {0, 0, 1};
  F1Sweep sweep = best_f1_sweep(scores, labels);
  double best = 0.0;
  for (double t : {-1.0, 0.1, 0.5, 0.85, 0.95, 2.0}) {
    best = std::max(best, f1_at(scores, labels, t));
  }
  CHECK(sweep.f1 == doctest::Approx(best));
}

TEST_CASE("best_f1_sweep degenerate all-equal scores") {
  // k positives of n at the all-positive threshold: f1 = 2k / (n + k).
  std::vector<double> scores(6, 0.4);
  std::vector<int> labels = {1, 0, 0, 1, 0, 0};
  F1Sweep sweep = best_f1_sweep(scores, labels);
  CHECK(sweep.f1 == doctest::Approx(2.0 * 2.0 / (6.0 + 2.0)));
  CHECK(sweep.threshold < 0.4);  // everything predicted positive
  CHECK(sweep.confusion.tp == 2);
  CHECK(sweep.confusion.fp == 4);
}

TEST_CASE("best_f1_sweep dominates any fixed threshold") {
  SeededRng rng(107);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 5 + rng.pick_index(60);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::round(rng.unit() * 20.0) / 20.0;
      labels[i] = static_cast<int>(rng.pick_index(2));
    }
    labels[0] = 1;
    labels[1] = 0;
    F1Sweep sweep = best_f1_sweep(scores, labels);
    for (int k = 0; k < 100; ++k) {
      double t = -0.1 + 1.2 * rng.unit();
      CHECK(sweep.f1 >= f1_at(scores, labels, t) - 1e-12);
    }
  }
}

TEST_CASE("kl and hellinger on explicit distributions") {
  std::vector<double> p = {0.75, 0.25};
  std::vector<double> q = {0.25, 0.75};
  CHECK(kl_divergence(p, q) == doctest::Approx(0.5 * std::log(3.0)));
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(hellinger_distance(p, p) == 0.0);
  CHECK(hellinger_distance(std::vector<double>{1.0, 0.0},
                           std::vector<double>{0.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("histogram divergences") {
  // Samples engineered to produce histograms [0.75, 0.25] vs [0.25, 0.75]
  // over two bins of [0, 1].
  std::vector<double> pos = {0.1, 0.2, 0.3, 0.9};
  std::vector<double> neg = {0.1, 0.7, 0.8, 1.0};
  DivergencePair pair = histogram_divergences(pos, neg, 2, 0.0);
  CHECK(pair.kl == doctest::Approx(0.5 * std::log(3.0)));

  // Identical samples per class: zero divergence.
  DivergencePair same = histogram_divergences(pos, pos, 20, 1e-6);
  CHECK(same.kl == 0.0);
  CHECK(same.hellinger == 0.0);

  // Disjoint point masses approach maximal Hellinger separation as the
  // smoothing vanishes.
  std::vector<double> left(50, 0.0);
  std::vector<double> right(50, 1.0);
  DivergencePair apart = histogram_divergences(left, right, 2, 1e-12);
  CHECK(apart.hellinger > 0.999);
  CHECK(apart.hellinger <= 1.0);
  CHECK(apart.kl > 0.0);
}

TEST_CASE("histogram divergences degenerate range") {
  std::vector<double> same_a(10, 0.5);
  std::vector<double> same_b(7, 0.5);
  DivergencePair flat = histogram_divergences(same_a, same_b, 20, 1e-6);
  CHECK(flat.kl == 0.0);
  CHECK(flat.hellinger == 0.0);
}

TEST_CASE("histogram divergence bounds hold on random inputs") {
  SeededRng rng(109);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 3 + rng.pick_index(40);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.unit() * 4.0 - 2.0;
      b[i] = rng.unit() * 4.0 - 2.0;
    }
    DivergencePair pair = histogram_divergences(a, b, 10, 1e-6);
    CHECK(pair.kl >= 0.0);
    CHECK(pair.hellinger >= 0.0);
    CHECK(pair.hellinger <= 1.0);
  }
}

TEST_CASE("evaluate_scores assembles the full report") {
  std::vector<double> scores = {0.9, 0.85, 0.7, 0.2, 0.15, 0.1};
  std::vector<int> labels = {1, 1, 1, 0, 0, 0};
  std::vector<std::vector<double>> features = {
      {3.0, 0.9}, {2.9, 0.95}, {2.7, 0.85}, {0.5, 0.2}, {0.4, 0.3}, {0.2, 0.1},
  };
  EvalReport report = evaluate_scores(scores, labels, features);
  CHECK(report.auroc == 1.0);
  CHECK(report.best_f1 == 1.0);
  CHECK(report.n_pos == 3);
  CHECK(report.n_neg == 3);
  CHECK(report.confusion.tp + report.confusion.fn == report.n_pos);
  CHECK(report.confusion.tn + report.confusion.fp == report.n_neg);
  CHECK(report.divergences.per_dimension.size() == 2);
  CHECK(report.divergences.kl_score > 0.0);
  CHECK(report.divergences.hellinger_score > 0.0);
}
