#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "stylediv/textops.hpp"
#include "stylediv/util.hpp"

using namespace stylediv;

namespace {

using Tokens = std::vector<std::string>;

// Direct recursion with the max(i, j) base case, no memoization. The
// independent oracle for the DP implementation.
std::size_t lev_recursive(const Tokens& a, const Tokens& b, std::size_t i,
                          std::size_t j) {
  if (i == 0 || j == 0) return std::max(i, j);
  std::size_t subst = lev_recursive(a, b, i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
  std::size_t del = lev_recursive(a, b, i - 1, j) + 1;
  std::size_t ins = lev_recursive(a, b, i, j - 1) + 1;
  return std::min({del, ins, subst});
}

std::size_t lev_oracle(const Tokens& a, const Tokens& b) {
  return lev_recursive(a, b, a.size(), b.size());
}

// Enumerate-and-intersect overlap oracle, no set machinery shared with the
// implementation.
double overlap_oracle(const Tokens& x, const Tokens& xh, std::size_t n1,
                      std::size_t n2) {
  double total = 0.0;
  for (std::size_t n = n1; n <= n2; ++n) {
    std::vector<Tokens> wx;
    for (std::size_t i = 0; i + n <= x.size(); ++i) {
      wx.emplace_back(x.begin() + i, x.begin() + i + n);
    }
    std::sort(wx.begin(), wx.end());
    wx.erase(std::unique(wx.begin(), wx.end()), wx.end());
    std::vector<Tokens> wh;
    for (std::size_t i = 0; i + n <= xh.size(); ++i) {
      wh.emplace_back(xh.begin() + i, xh.begin() + i + n);
    }
    std::sort(wh.begin(), wh.end());
    wh.erase(std::unique(wh.begin(), wh.end()), wh.end());
    std::size_t count = 0;
    for (const Tokens& g : wx) {
      if (std::binary_search(wh.begin(), wh.end(), g)) ++count;
    }
    total += static_cast<double>(count);
  }
  return total / static_cast<double>(n2 - n1);
}

Tokens random_tokens(SeededRng& rng, std::size_t max_len,
                     const std::vector<std::string>& alphabet) {
  Tokens out(rng.pick_index(max_len + 1));
  for (auto& t : out) t = alphabet[rng.pick_index(alphabet.size())];
  return out;
}

TokenSequence as_seq(Tokens tokens) {
  TokenSequence seq;
  seq.tokens = std::move(tokens);
  return seq;
}

}  // namespace

TEST_CASE("tokenize splits on whitespace and detaches boundary punctuation") {
  CHECK(tokenize("The cat sat.").tokens == Tokens{"the", "cat", "sat", "."});
  CHECK(tokenize("").tokens == Tokens{});
  CHECK(tokenize("don't stop").tokens == Tokens{"don't", "stop"});
  CHECK(tokenize("(hello)...").tokens == Tokens{"(", "hello", ")", ".", ".", "."});
  CHECK(tokenize("  a\t\nb ").tokens == Tokens{"a", "b"});
  CHECK(tokenize("--").tokens == Tokens{"-", "-"});

  TokenizerConfig keep_case{.lowercase = false};
  CHECK(tokenize("The Cat", keep_case).tokens == Tokens{"The", "Cat"});
}

TEST_CASE("tokenize is deterministic and never emits empty tokens") {
  SeededRng rng(11);
  std::vector<std::string> alphabet = {"abc", "x,y", "!?", "don't", "Mix3d", "."};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    std::size_t parts = rng.pick_index(12);
    for (std::size_t i = 0; i < parts; ++i) {
      text += alphabet[rng.pick_index(alphabet.size())];
      text += rng.pick_index(2) ? " " : "  ";
    }
    TokenSequence a = tokenize(text);
    TokenSequence b = tokenize(text);
    CHECK(a.tokens == b.tokens);
    CHECK(a.source_length_chars == text.size());
    for (const auto& t : a.tokens) CHECK(!t.empty());
  }
}

TEST_CASE("tokenize-join idempotence for punctuation-detached streams") {
  SeededRng rng(12);
  std::vector<std::string> alphabet = {"alpha", "beta", "gamma", ".", "!", "delta"};
  for (int trial = 0; trial < 100; ++trial) {
    Tokens tokens = random_tokens(rng, 15, alphabet);
    TokenSequence round = tokenize(detokenize(tokens));
    CHECK(round.tokens == tokens);
  }
}

TEST_CASE("ngram_set enumerates distinct contiguous windows") {
  NGramSet unigrams = ngram_set(as_seq({"a", "b", "a", "b"}), 1);
  CHECK(unigrams.size() == 2);
  CHECK(unigrams.grams.count({"a"}) == 1);
  CHECK(unigrams.grams.count({"b"}) == 1);

  NGramSet trigram = ngram_set(as_seq({"a", "b", "c"}), 3);
  CHECK(trigram.size() == 1);
  CHECK(trigram.grams.count({"a", "b", "c"}) == 1);

  CHECK(ngram_set(as_seq({"a", "b"}), 3).size() == 0);
  CHECK_THROWS_AS(ngram_set(as_seq({"a"}), 0), std::invalid_argument);
}

TEST_CASE("ngram_set cardinality bound") {
  SeededRng rng(13);
  std::vector<std::string> alphabet = {"a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    TokenSequence seq = as_seq(random_tokens(rng, 12, alphabet));
    std::size_t n = 1 + rng.pick_index(5);
    NGramSet set = ngram_set(seq, n);
    std::size_t window_count = seq.size() >= n ? seq.size() - n + 1 : 0;
    CHECK(set.size() <= window_count);
    for (const NGram& gram : set.grams) CHECK(gram.size() == n);
  }
}

TEST_CASE("ngram_overlap_feature matches hand-enumerated values") {
  TokenSequence x = as_seq({"a", "b", "c", "d"});
  TokenSequence xh = as_seq({"a", "b", "c", "e"});
  CHECK(ngram_overlap_feature(x, xh, 1, 3) == doctest::Approx(3.0));

  TokenSequence p = as_seq({"a", "b"});
  TokenSequence q = as_seq({"c", "d"});
  CHECK(ngram_overlap_feature(p, q, 1, 3) == 0.0);

  TokenSequence s = as_seq({"a", "b", "c"});
  CHECK(ngram_overlap_feature(s, s, 1, 2) == doctest::Approx(5.0));

  CHECK_THROWS_AS(ngram_overlap_feature(x, xh, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(ngram_overlap_feature(x, xh, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(ngram_overlap_feature(x, xh, 0, 2), std::invalid_argument);
}

TEST_CASE("ngram_overlap_feature equals the enumerate-and-intersect oracle") {
  SeededRng rng(17);
  std::vector<std::string> alphabet = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 300; ++trial) {
    TokenSequence x = as_seq(random_tokens(rng, 20, alphabet));
    TokenSequence xh = as_seq(random_tokens(rng, 20, alphabet));
    std::size_t n1 = 1 + rng.pick_index(3);
    std::size_t n2 = n1 + 1 + rng.pick_index(3);
    double expected = overlap_oracle(x.tokens, xh.tokens, n1, n2);
    CHECK(ngram_overlap_feature(x, xh, n1, n2) == expected);
    // symmetry in the two text arguments
    CHECK(ngram_overlap_feature(xh, x, n1, n2) == expected);
  }
}

TEST_CASE("self-overlap upper-bounds overlap with any rewrite") {
  SeededRng rng(19);
  std::vector<std::string> alphabet = {"a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    TokenSequence x = as_seq(random_tokens(rng, 15, alphabet));
    TokenSequence xh = as_seq(random_tokens(rng, 15, alphabet));
    CHECK(ngram_overlap_feature(x, x, 1, 4) >= ngram_overlap_feature(x, xh, 1, 4));
  }
}

TEST_CASE("edit_distance basics") {
  Tokens a = {"the", "cat", "sat"};
  Tokens b = {"the", "dog", "sat"};
  CHECK(edit_distance(a, b) == 1);
  CHECK(edit_distance(a, a) == 0);
  CHECK(edit_distance({}, Tokens{"a", "b"}) == 2);
  CHECK(edit_distance(Tokens{"a", "b"}, {}) == 2);
}

TEST_CASE("edit_distance equals the direct recursion on an exhaustive grid") {
  // Exhaustive over all pairs with lengths <= 4 on a 3-token alphabet; the
  // full length-7 sweep lives in the acceptance suite.
  std::vector<std::string> alphabet = {"a", "b", "c"};
  std::vector<Tokens> sequences;
  sequences.push_back({});
  std::size_t begin = 0;
  for (int len = 1; len <= 4; ++len) {
    std::size_t end = sequences.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& sym : alphabet) {
        Tokens next = sequences[i];
        next.push_back(sym);
        sequences.push_back(std::move(next));
      }
    }
    begin = end;
  }
  for (const Tokens& a : sequences) {
    for (const Tokens& b : sequences) {
      CHECK(edit_distance(a, b) == lev_oracle(a, b));
    }
  }
}

TEST_CASE("edit_distance matches the recursion on random length-7 pairs") {
  SeededRng rng(23);
  std::vector<std::string> alphabet = {"a", "b", "c"};
  for (int trial = 0; trial < 500; ++trial) {
    Tokens a = random_tokens(rng, 7, alphabet);
    Tokens b = random_tokens(rng, 7, alphabet);
    CHECK(edit_distance(a, b) == lev_oracle(a, b));
  }
}

TEST_CASE("edit_distance satisfies the metric axioms") {
  SeededRng rng(29);
  std::vector<std::string> alphabet = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    Tokens x = random_tokens(rng, 8, alphabet);
    Tokens y = random_tokens(rng, 8, alphabet);
    Tokens z = random_tokens(rng, 8, alphabet);
    CHECK(edit_distance(x, x) == 0);
    CHECK(edit_distance(x, y) == edit_distance(y, x));
    CHECK(edit_distance(x, z) <= edit_distance(x, y) + edit_distance(y, z));
    CHECK(edit_distance(x, y) <= std::max(x.size(), y.size()));
  }
}

TEST_CASE("edit_similarity_feature stays in [0, 1]") {
  TokenSequence a = as_seq({"the", "cat", "sat"});
  TokenSequence b = as_seq({"the", "dog", "sat"});
  CHECK(edit_similarity_feature(a, b) == doctest::Approx(1.0 - 1.0 / 3.0));
  CHECK(edit_similarity_feature(a, a) == 1.0);
  CHECK(edit_similarity_feature(as_seq({"a", "b"}), as_seq({"c", "d"})) == 0.0);
  CHECK(edit_similarity_feature(as_seq({}), as_seq({})) == 1.0);
  CHECK(edit_similarity_feature(as_seq({}), as_seq({"a", "b"})) == 0.0);

  SeededRng rng(31);
  std::vector<std::string> alphabet = {"a", "b", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    TokenSequence x = as_seq(random_tokens(rng, 9, alphabet));
    TokenSequence y = as_seq(random_tokens(rng, 9, alphabet));
    double sim = edit_similarity_feature(x, y);
    CHECK(sim >= 0.0);
    CHECK(sim <= 1.0);
  }
}

TEST_CASE("character-level similarity variant") {
  TokenSequence a = as_seq({"abc"});
  TokenSequence b = as_seq({"abd"});
  // "abc" vs "abd": one substitution over three characters.
  CHECK(edit_similarity_feature(a, b, EditGranularity::character) ==
        doctest::Approx(1.0 - 1.0 / 3.0));
  CHECK(edit_similarity_feature(a, a, EditGranularity::character) == 1.0);
}

TEST_CASE("discrete_block combines the two features") {
  TokenSequence s = as_seq({"a", "b", "c"});
  DiscreteStyleBlock same = discrete_block(s, s, 1, 2);
  CHECK(same.v_n == doctest::Approx(5.0));
  CHECK(same.v_edit == 1.0);

  DiscreteStyleBlock disjoint =
      discrete_block(as_seq({"a", "b"}), as_seq({"c", "d"}), 1, 2);
  CHECK(disjoint.v_n == 0.0);
  CHECK(disjoint.v_edit == 0.0);

  // ["the","cat","sat"] vs ["the","dog","sat"], n in {1, 2}: unigram
  // intersection {the, sat} = 2, bigram intersection empty, divisor 1.
  TokenSequence x = as_seq({"the", "cat", "sat"});
  TokenSequence xh = as_seq({"the", "dog", "sat"});
  CHECK(overlap_oracle(x.tokens, xh.tokens, 1, 2) == 2.0);
  DiscreteStyleBlock block = discrete_block(x, xh, 1, 2);
  CHECK(block.v_n == doctest::Approx(2.0));
  CHECK(block.v_edit == doctest::Approx(2.0 / 3.0));
}
