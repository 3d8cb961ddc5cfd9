#include "stylediv/harness.hpp"

#include <algorithm>

#include "stylediv/errors.hpp"
#include "stylediv/util.hpp"

namespace stylediv {

namespace {

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    if (end > pos) out.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

bool ends_sentence_ws(const std::string& token) {
  return !token.empty() &&
         (token.back() == '.' || token.back() == '!' || token.back() == '?');
}

std::string join_ws(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

std::vector<MixedDocument> mix_corpus(std::span<const Document> human_docs,
                                      std::span<const Document> machine_docs,
                                      double ratio, std::uint64_t seed) {
  std::vector<MixedDocument> out;
  out.reserve(human_docs.size());

  if (ratio <= 0.0) {
    for (const Document& doc : human_docs) {
      out.push_back(MixedDocument{doc, TokenSpan{0, 0}});
    }
    return out;
  }
  if (machine_docs.empty()) throw Error("mix_corpus: no machine documents");

  for (const Document& human : human_docs) {
    std::vector<std::string> tokens = split_ws(human.text);
    auto machine_count =
        static_cast<std::size_t>(static_cast<double>(tokens.size()) / ratio);
    SeededRng rng(fnv1a64_mix(fnv1a64(human.id), seed));
    if (machine_count == 0) {
      out.push_back(MixedDocument{human, TokenSpan{0, 0}});
      continue;
    }

    // Seeded machine segment of the required token length.
    std::size_t attempts = machine_docs.size();
    std::vector<std::string> machine_tokens;
    while (attempts-- > 0) {
      const Document& pick = machine_docs[rng.pick_index(machine_docs.size())];
      std::vector<std::string> cand = split_ws(pick.text);
      if (cand.size() >= machine_count) {
        std::size_t start = rng.pick_index(cand.size() - machine_count + 1);
        machine_tokens.assign(cand.begin() + static_cast<std::ptrdiff_t>(start),
                              cand.begin() + static_cast<std::ptrdiff_t>(start + machine_count));
        break;
      }
    }
    if (machine_tokens.empty()) {
      throw Error("mix_corpus: no machine document long enough for " +
                  std::to_string(machine_count) + " tokens");
    }

    // Insert at a seeded sentence boundary (document edges included).
    std::vector<std::size_t> boundaries{0};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (ends_sentence_ws(tokens[i])) boundaries.push_back(i + 1);
    }
    if (boundaries.back() != tokens.size()) boundaries.push_back(tokens.size());
    std::size_t insert_at = boundaries[rng.pick_index(boundaries.size())];

    std::vector<std::string> mixed;
    mixed.reserve(tokens.size() + machine_tokens.size());
    mixed.insert(mixed.end(), tokens.begin(),
                 tokens.begin() + static_cast<std::ptrdiff_t>(insert_at));
    mixed.insert(mixed.end(), machine_tokens.begin(), machine_tokens.end());
    mixed.insert(mixed.end(), tokens.begin() + static_cast<std::ptrdiff_t>(insert_at),
                 tokens.end());

    MixedDocument mixed_doc;
    mixed_doc.doc.id = human.id + "+mix";
    mixed_doc.doc.text = join_ws(mixed);
    mixed_doc.doc.label = 1;
    mixed_doc.doc.domain = human.domain;
    mixed_doc.machine_span = TokenSpan{insert_at, insert_at + machine_tokens.size()};
    out.push_back(std::move(mixed_doc));
  }
  return out;
}

std::vector<Document> perturb_corpus(std::span<const Document> docs,
                                     const DeterministicRuleConfig& rule,
                                     std::uint64_t seed,
                                     const SynonymTable& synonyms) {
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const Document& doc : docs) {
    std::vector<std::string> tokens = split_ws(doc.text);
    std::uint64_t doc_seed = fnv1a64_mix(fnv1a64(doc.id), seed);
    std::vector<std::string> perturbed =
        deterministic_rewrite(tokens, rule, doc_seed, synonyms);
    Document copy = doc;
    copy.text = join_ws(perturbed);
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace stylediv
