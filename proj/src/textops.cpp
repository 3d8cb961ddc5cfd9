#include "stylediv/textops.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

namespace stylediv {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

TokenSequence tokenize(std::string_view text, const TokenizerConfig& config) {
  TokenSequence seq;
  seq.source_length_chars = text.size();

  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::string_view chunk = text.substr(pos, end - pos);
    pos = end;

    std::size_t b = 0;
    std::size_t e = chunk.size();
    while (b < e && is_punct(chunk[b])) {
      seq.tokens.emplace_back(1, chunk[b]);
      ++b;
    }
    std::size_t trailing_begin = e;
    while (trailing_begin > b && is_punct(chunk[trailing_begin - 1])) --trailing_begin;
    if (trailing_begin > b) {
      std::string_view core = chunk.substr(b, trailing_begin - b);
      seq.tokens.push_back(config.lowercase ? lower_ascii(core) : std::string(core));
    }
    for (std::size_t i = trailing_begin; i < e; ++i) {
      seq.tokens.emplace_back(1, chunk[i]);
    }
  }
  return seq;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

NGramSet ngram_set(const TokenSequence& seq, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ngram_set: n must be >= 1");
  NGramSet set;
  set.n = n;
  if (n > seq.size()) return set;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    set.grams.emplace(seq.tokens.begin() + static_cast<std::ptrdiff_t>(i),
                      seq.tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
  }
  return set;
}

std::size_t ngram_intersection_size(const NGramSet& a, const NGramSet& b) {
  const auto& small = a.grams.size() <= b.grams.size() ? a : b;
  const auto& large = a.grams.size() <= b.grams.size() ? b : a;
  std::size_t count = 0;
  for (const auto& gram : small.grams) {
    if (large.grams.count(gram)) ++count;
  }
  return count;
}

double ngram_overlap_feature(const TokenSequence& x, const TokenSequence& x_hat,
                             std::size_t n1, std::size_t n2,
                             const OverlapConfig& config) {
  if (n1 < 1 || n1 >= n2) {
    throw std::invalid_argument("ngram_overlap_feature: requires 1 <= n1 < n2");
  }
  double total = 0.0;
  for (std::size_t n = n1; n <= n2; ++n) {
    NGramSet a = ngram_set(x, n);
    NGramSet b = ngram_set(x_hat, n);
    double inter = static_cast<double>(ngram_intersection_size(a, b));
    if (config.normalize) {
      std::size_t denom = std::max(a.size(), b.size());
      total += denom ? inter / static_cast<double>(denom) : 0.0;
    } else {
      total += inter;
    }
  }
  return total / static_cast<double>(n2 - n1);
}

namespace {

// Rolling single-row Levenshtein. Element type only needs operator==.
template <class Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  if (na == 0) return nb;
  if (nb == 0) return na;

  // Keep the inner dimension the shorter one: O(min(na, nb)) memory.
  if (nb > na) return levenshtein(b, a);

  std::vector<std::size_t> row(nb + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= na; ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= nb; ++j) {
      std::size_t up = row[j];
      std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j - 1] + 1, up + 1, subst});
      diag = up;
    }
  }
  return row[nb];
}

}  // namespace

std::size_t edit_distance(std::span<const std::string> a,
                          std::span<const std::string> b) {
  return levenshtein(a, b);
}

std::size_t edit_distance_chars(std::string_view a, std::string_view b) {
  return levenshtein(a, b);
}

double edit_similarity_feature(const TokenSequence& x, const TokenSequence& x_hat,
                               EditGranularity granularity) {
  if (x.empty() && x_hat.empty()) return 1.0;
  if (granularity == EditGranularity::word) {
    std::size_t dist = edit_distance(x.tokens, x_hat.tokens);
    std::size_t denom = std::max(x.size(), x_hat.size());
    return 1.0 - static_cast<double>(dist) / static_cast<double>(denom);
  }
  std::string a = detokenize(x.tokens);
  std::string b = detokenize(x_hat.tokens);
  std::size_t dist = edit_distance_chars(a, b);
  std::size_t denom = std::max(a.size(), b.size());
  return denom ? 1.0 - static_cast<double>(dist) / static_cast<double>(denom) : 1.0;
}

DiscreteStyleBlock discrete_block(const TokenSequence& x, const TokenSequence& x_hat,
                                  std::size_t n1, std::size_t n2,
                                  const OverlapConfig& overlap,
                                  EditGranularity granularity) {
  return DiscreteStyleBlock{
      ngram_overlap_feature(x, x_hat, n1, n2, overlap),
      edit_similarity_feature(x, x_hat, granularity),
  };
}

}  // namespace stylediv
