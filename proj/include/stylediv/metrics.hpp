#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stylediv {

// Rank-based (Mann-Whitney) AUROC: fraction of (positive, negative) pairs
// with score_pos > score_neg, ties counted as one half. Throws
// std::invalid_argument unless both classes are present.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
};

struct F1Sweep {
  double f1 = 0.0;
  double threshold = 0.0;
  Confusion confusion;
};

// Sweeps F1 (positive class = 1, predicted positive iff score > threshold)
// over every midpoint between consecutive distinct scores plus below-min /
// above-max sentinels. Ties break toward the larger threshold.
F1Sweep best_f1_sweep(std::span<const double> scores, std::span<const int> labels);

// KL(P || Q) = sum p * ln(p / q) over probability vectors of equal length.
// Terms with p == 0 contribute zero; p > 0 against q == 0 yields +infinity.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// (1/sqrt(2)) * || sqrt(p) - sqrt(q) ||_2, clamped into [0, 1].
double hellinger_distance(std::span<const double> p, std::span<const double> q);

struct DivergencePair {
  double kl = 0.0;
  double hellinger = 0.0;
};

// Histograms both sample sets over their common [min, max] range with
// equal-width bins, applies add-epsilon smoothing with renormalization, and
// reports KL(P || Q) and Hellinger between the smoothed histograms
// (P = first sample set). A degenerate common range yields {0, 0}.
DivergencePair histogram_divergences(std::span<const double> p_samples,
                                     std::span<const double> q_samples,
                                     int bins = 20, double epsilon = 1e-6);

struct DivergenceReport {
  double kl_feature = 0.0;  // mean across feature dimensions
  double kl_score = 0.0;
  double hellinger_feature = 0.0;
  double hellinger_score = 0.0;
  std::vector<DivergencePair> per_dimension;
  int bin_count = 20;
  double epsilon = 1e-6;
};

struct EvalReport {
  double auroc = 0.0;
  double best_f1 = 0.0;
  double best_threshold = 0.0;
  Confusion confusion;
  long n_pos = 0;
  long n_neg = 0;
  DivergenceReport divergences;
};

// Assembles AUROC / swept F1 / confusion counts, plus divergences on
// classifier scores and on each feature dimension (class 1 as P).
EvalReport evaluate_scores(std::span<const double> scores,
                           std::span<const int> labels,
                           const std::vector<std::vector<double>>& features = {},
                           int bins = 20, double epsilon = 1e-6);

}  // namespace stylediv
