#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stylediv/dataset.hpp"
#include "stylediv/textops.hpp"

namespace stylediv {

inline constexpr std::string_view kPromptPlaceholder = "{text}";

struct RewritePrompt {
  std::string id;
  std::string template_text;  // must contain exactly one {text} placeholder
};

// Throws ConfigError unless the template contains exactly one placeholder.
void validate_prompt(const RewritePrompt& prompt);

std::string render_prompt(const RewritePrompt& prompt, std::string_view text);

// Shipped defaults: a fluency-improvement prompt and a concise paraphrase
// prompt.
std::vector<RewritePrompt> default_prompts();

// A document's rewritten variants, one per prompt, in prompt order.
struct RewriteSet {
  std::string document_id;
  std::vector<std::pair<std::string, std::string>> rewrites;  // (prompt_id, text)
  std::string provider_id;
};

enum class RewriteRule { identity, synonym_swap, shuffle_window, drop_rate };

// Throws ConfigError for unknown rule names.
RewriteRule rewrite_rule_from_string(std::string_view name);
std::string to_string(RewriteRule rule);

struct DeterministicRuleConfig {
  RewriteRule rule = RewriteRule::identity;
  double rate = 0.0;        // in [0, 1]; swap/drop fraction
  std::size_t window = 3;   // shuffle window length
};

using SynonymTable = std::unordered_map<std::string, std::string>;

// Built-in involutive synonym pairs (a->b and b->a), lowercase.
const SynonymTable& default_synonym_table();

// Applies the rule with a seeded pseudo-random stream:
//   identity       - copies the input
//   synonym_swap   - replaces round(rate * eligible) table-eligible tokens
//   shuffle_window - shuffles tokens inside consecutive fixed-size windows
//   drop_rate      - removes round(rate * n) tokens, always keeping one
// Token count changes only under drop_rate.
std::vector<std::string> deterministic_rewrite(
    std::span<const std::string> tokens, const DeterministicRuleConfig& rule,
    std::uint64_t seed, const SynonymTable& synonyms = default_synonym_table());

class RewriteProvider {
 public:
  virtual ~RewriteProvider() = default;
  virtual std::string rewrite_text(const std::string& text,
                                   const RewritePrompt& prompt) = 0;
  virtual std::string id() const = 0;
};

// Offline provider: maps each prompt id to a deterministic rule. Output
// depends only on (text, prompt id, seed). The text is run through the
// punctuation-detaching tokenizer (case preserved) and rejoined with
// single spaces.
struct DeterministicRewriterConfig {
  std::uint64_t seed = 0;
  std::map<std::string, DeterministicRuleConfig> rules;  // by prompt id
  DeterministicRuleConfig default_rule;                  // for unmapped prompts
  SynonymTable synonyms = default_synonym_table();
};

class DeterministicRewriteProvider final : public RewriteProvider {
 public:
  explicit DeterministicRewriteProvider(DeterministicRewriterConfig config);

  std::string rewrite_text(const std::string& text,
                           const RewritePrompt& prompt) override;
  std::string id() const override;

 private:
  DeterministicRewriterConfig config_;
};

// Chat-completion HTTP client: request {model, messages, temperature},
// response {choices: [{message: {content}}]}. Empty completions are
// failures, never silently replaced by the input.
struct RemoteRewriterConfig {
  std::string endpoint;  // e.g. http://host:port/v1/chat/completions
  std::string model;
  std::string auth_env = "STYLEDIV_REWRITE_TOKEN";
  double temperature = 0.0;
  int timeout_ms = 30000;
  int max_retries = 3;
  int retry_backoff_ms = 100;
};

class RemoteChatRewriter final : public RewriteProvider {
 public:
  explicit RemoteChatRewriter(RemoteRewriterConfig config);

  std::string rewrite_text(const std::string& text,
                           const RewritePrompt& prompt) override;
  std::string id() const override;

  std::size_t request_count() const { return requests_.load(); }

 private:
  RemoteRewriterConfig config_;
  std::atomic<std::size_t> requests_{0};
};

// JSON-lines rewrite cache: one record {key, prompt_id, text} per line.
class RewriteCache {
 public:
  explicit RewriteCache(std::string path);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& prompt_id,
           const std::string& text);
  std::size_t size() const;

  static std::string key(const std::string& provider_id,
                         const std::string& prompt_id, const std::string& text);

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

// One rewrite per prompt, in prompt order, cache-first. Prompts that still
// fail after the provider's retries are collected into a RewriteError; the
// original text is never substituted.
RewriteSet rewrite(const Document& doc, std::span<const RewritePrompt> prompts,
                   RewriteProvider& provider, RewriteCache* cache = nullptr);

}  // namespace stylediv
