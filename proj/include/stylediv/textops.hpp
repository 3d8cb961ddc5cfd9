#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stylediv {

struct TokenizerConfig {
  bool lowercase = true;
};

// Whitespace-delimited tokens with leading/trailing ASCII punctuation
// detached as standalone tokens. Never contains empty strings.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::size_t source_length_chars = 0;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

TokenSequence tokenize(std::string_view text, const TokenizerConfig& config = {});

// Joins tokens with single spaces. tokenize(detokenize(seq)) reproduces the
// token list for punctuation-detached sequences.
std::string detokenize(std::span<const std::string> tokens);

using NGram = std::vector<std::string>;

// Set of all contiguous n-token windows, duplicates collapsed.
struct NGramSet {
  std::size_t n = 1;
  std::set<NGram> grams;

  std::size_t size() const noexcept { return grams.size(); }
};

// Throws std::invalid_argument for n == 0. n beyond the sequence length
// yields an empty set.
NGramSet ngram_set(const TokenSequence& seq, std::size_t n);

std::size_t ngram_intersection_size(const NGramSet& a, const NGramSet& b);

struct OverlapConfig {
  // When set, each per-n intersection is divided by the larger of the two
  // distinct-gram counts before averaging (length-robust variant). The
  // default keeps raw intersection cardinalities.
  bool normalize = false;
};

// Averaged n-gram overlap between two token sequences for n in [n1, n2],
// scaled by 1/(n2 - n1). Requires 1 <= n1 < n2.
double ngram_overlap_feature(const TokenSequence& x, const TokenSequence& x_hat,
                             std::size_t n1, std::size_t n2,
                             const OverlapConfig& config = {});

// Token-level Levenshtein distance (unit-cost insert/delete/substitute),
// O(|a|*|b|) time and O(min(|a|,|b|)) memory.
std::size_t edit_distance(std::span<const std::string> a,
                          std::span<const std::string> b);

// Character-level variant over raw byte sequences.
std::size_t edit_distance_chars(std::string_view a, std::string_view b);

enum class EditGranularity { word, character };

// 1 - L(x, x_hat) / max(|x|, |x_hat|), in [0, 1]. Both-empty pairs compare
// as identical (1.0). Character granularity runs the distance over the
// space-joined token streams and normalizes by their byte lengths.
double edit_similarity_feature(const TokenSequence& x, const TokenSequence& x_hat,
                               EditGranularity granularity = EditGranularity::word);

struct DiscreteStyleBlock {
  double v_n = 0.0;
  double v_edit = 0.0;
};

DiscreteStyleBlock discrete_block(const TokenSequence& x, const TokenSequence& x_hat,
                                  std::size_t n1, std::size_t n2,
                                  const OverlapConfig& overlap = {},
                                  EditGranularity granularity = EditGranularity::word);

}  // namespace stylediv
