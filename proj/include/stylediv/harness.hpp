#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stylediv/attribution.hpp"
#include "stylediv/dataset.hpp"
#include "stylediv/rewriter.hpp"

namespace stylediv {

// A composite document with the token interval that came from the machine
// source. Composites are labeled 1 (machine-containing).
struct MixedDocument {
  Document doc;
  TokenSpan machine_span;
};

// Blends machine-generated tokens into each human document at a
// human:machine token-count ratio (4:1 by default reading: ratio = 4 means
// floor(human_tokens / 4) machine tokens are inserted as one contiguous
// segment at a seeded sentence boundary). ratio <= 0 leaves the corpus
// unchanged with labels preserved. Throws Error when the machine pool
// cannot supply a long enough segment.
std::vector<MixedDocument> mix_corpus(std::span<const Document> human_docs,
                                      std::span<const Document> machine_docs,
                                      double ratio, std::uint64_t seed);

// Applies a deterministic rewrite rule to every document as a perturbation
// operator; labels are preserved. Per-document streams are derived from
// (seed, document id) so results do not depend on corpus order.
std::vector<Document> perturb_corpus(std::span<const Document> docs,
                                     const DeterministicRuleConfig& rule,
                                     std::uint64_t seed,
                                     const SynonymTable& synonyms = default_synonym_table());

}  // namespace stylediv
