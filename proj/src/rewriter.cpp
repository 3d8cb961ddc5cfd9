#include "stylediv/rewriter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "stylediv/errors.hpp"
#include "stylediv/util.hpp"

namespace stylediv {

using nlohmann::json;

void validate_prompt(const RewritePrompt& prompt) {
  if (prompt.id.empty()) throw ConfigError("prompt id must be non-empty");
  auto first = prompt.template_text.find(kPromptPlaceholder);
  if (first == std::string::npos) {
    throw ConfigError("prompt '" + prompt.id + "' lacks the {text} placeholder");
  }
  if (prompt.template_text.find(kPromptPlaceholder, first + 1) != std::string::npos) {
    throw ConfigError("prompt '" + prompt.id + "' has multiple {text} placeholders");
  }
}

std::string render_prompt(const RewritePrompt& prompt, std::string_view text) {
  validate_prompt(prompt);
  std::string out = prompt.template_text;
  out.replace(out.find(kPromptPlaceholder), kPromptPlaceholder.size(),
              std::string(text));
  return out;
}

std::vector<RewritePrompt> default_prompts() {
  return {
      {"fluency",
       "Rewrite the following text, improving fluency while preserving its "
       "meaning. Return only the rewritten text.\n\n{text}"},
      {"concise",
       "Paraphrase the following text concisely, preserving its meaning. "
       "Return only the paraphrase.\n\n{text}"},
  };
}

RewriteRule rewrite_rule_from_string(std::string_view name) {
  if (name == "identity") return RewriteRule::identity;
  if (name == "synonym-swap") return RewriteRule::synonym_swap;
  if (name == "shuffle-window") return RewriteRule::shuffle_window;
  if (name == "drop-rate") return RewriteRule::drop_rate;
  throw ConfigError("unknown rewrite rule '" + std::string(name) + "'");
}

std::string to_string(RewriteRule rule) {
  switch (rule) {
    case RewriteRule::identity: return "identity";
    case RewriteRule::synonym_swap: return "synonym-swap";
    case RewriteRule::shuffle_window: return "shuffle-window";
    case RewriteRule::drop_rate: return "drop-rate";
  }
  return "identity";
}

const SynonymTable& default_synonym_table() {
  static const SynonymTable table = [] {
    // Involutive pairs so swapped tokens stay swap-eligible.
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"quick", "fast"},     {"big", "large"},      {"small", "tiny"},
        {"begin", "start"},    {"end", "finish"},     {"happy", "glad"},
        {"sad", "unhappy"},    {"smart", "clever"},   {"hard", "difficult"},
        {"easy", "simple"},    {"old", "ancient"},    {"new", "recent"},
        {"good", "fine"},      {"bad", "poor"},       {"cold", "chilly"},
        {"hot", "warm"},       {"bright", "shiny"},   {"dark", "dim"},
        {"loud", "noisy"},     {"quiet", "silent"},   {"strong", "sturdy"},
        {"weak", "feeble"},    {"rich", "wealthy"},   {"cheap", "inexpensive"},
        {"near", "close"},     {"far", "distant"},    {"angry", "mad"},
        {"calm", "peaceful"},  {"clean", "spotless"}, {"dirty", "filthy"},
        {"empty", "vacant"},   {"full", "packed"},    {"tall", "high"},
        {"short", "brief"},    {"wide", "broad"},     {"narrow", "slim"},
        {"heavy", "weighty"},  {"light", "airy"},     {"wet", "damp"},
        {"dry", "arid"},       {"fancy", "ornate"},   {"plain", "modest"},
        {"true", "correct"},   {"false", "wrong"},    {"wild", "untamed"},
        {"tame", "docile"},    {"rough", "coarse"},   {"smooth", "sleek"},
    };
    SynonymTable t;
    for (const auto& [a, b] : pairs) {
      t[a] = b;
      t[b] = a;
    }
    return t;
  }();
  return table;
}

std::vector<std::string> deterministic_rewrite(std::span<const std::string> tokens,
                                               const DeterministicRuleConfig& rule,
                                               std::uint64_t seed,
                                               const SynonymTable& synonyms) {
  if (rule.rate < 0.0 || rule.rate > 1.0) {
    throw ConfigError("rewrite rule rate must be in [0, 1]");
  }
  std::vector<std::string> out(tokens.begin(), tokens.end());
  SeededRng rng(seed);

  switch (rule.rule) {
    case RewriteRule::identity:
      break;

    case RewriteRule::synonym_swap: {
      std::vector<std::size_t> eligible;
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (synonyms.count(out[i])) eligible.push_back(i);
      }
      auto swaps = static_cast<std::size_t>(
          std::llround(rule.rate * static_cast<double>(eligible.size())));
      rng.shuffle(eligible);
      for (std::size_t k = 0; k < swaps; ++k) {
        std::string& token = out[eligible[k]];
        token = synonyms.at(token);
      }
      break;
    }

    case RewriteRule::shuffle_window: {
      if (rule.window < 2) break;
      for (std::size_t begin = 0; begin < out.size(); begin += rule.window) {
        std::size_t end = std::min(begin + rule.window, out.size());
        for (std::size_t i = end - begin; i > 1; --i) {
          std::swap(out[begin + i - 1], out[begin + rng.pick_index(i)]);
        }
      }
      break;
    }

    case RewriteRule::drop_rate: {
      if (out.empty()) break;
      auto drops = static_cast<std::size_t>(
          std::llround(rule.rate * static_cast<double>(out.size())));
      drops = std::min(drops, out.size() - 1);  // always keep one token
      if (drops == 0) break;
      std::vector<std::size_t> indices(out.size());
      for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
      rng.shuffle(indices);
      std::vector<bool> dropped(out.size(), false);
      for (std::size_t k = 0; k < drops; ++k) dropped[indices[k]] = true;
      std::vector<std::string> kept;
      kept.reserve(out.size() - drops);
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!dropped[i]) kept.push_back(std::move(out[i]));
      }
      out = std::move(kept);
      break;
    }
  }
  return out;
}

DeterministicRewriteProvider::DeterministicRewriteProvider(
    DeterministicRewriterConfig config)
    : config_(std::move(config)) {}

std::string DeterministicRewriteProvider::rewrite_text(const std::string& text,
                                                       const RewritePrompt& prompt) {
  const DeterministicRuleConfig* rule = &config_.default_rule;
  if (auto it = config_.rules.find(prompt.id); it != config_.rules.end()) {
    rule = &it->second;
  }
  // Per-call stream depends only on (text, prompt id, global seed).
  std::uint64_t seed = fnv1a64_mix(fnv1a64(prompt.id, fnv1a64(text)), config_.seed);
  TokenizerConfig keep_case{.lowercase = false};
  TokenSequence seq = tokenize(text, keep_case);
  return detokenize(deterministic_rewrite(seq.tokens, *rule, seed, config_.synonyms));
}

std::string DeterministicRewriteProvider::id() const {
  // Rules participate in the identity so cache entries never cross configs.
  std::string rules_repr = to_string(config_.default_rule.rule) + ":" +
                           std::to_string(config_.default_rule.rate);
  for (const auto& [pid, rule] : config_.rules) {
    rules_repr += "|" + pid + "=" + to_string(rule.rule) + ":" +
                  std::to_string(rule.rate) + ":" + std::to_string(rule.window);
  }
  return "det-rewrite:seed=" + to_hex(config_.seed) + ":" +
         to_hex(fnv1a64(rules_repr));
}

RemoteChatRewriter::RemoteChatRewriter(RemoteRewriterConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw ConfigError("remote rewriter requires an endpoint");
  }
}

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must look like http://host[:port]/path, got '" +
                      endpoint + "'");
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

std::string RemoteChatRewriter::rewrite_text(const std::string& text,
                                             const RewritePrompt& prompt) {
  auto [host, path] = split_endpoint(config_.endpoint);
  json request{
      {"model", config_.model},
      {"messages", json::array({json{{"role", "user"},
                                     {"content", render_prompt(prompt, text)}}})},
      {"temperature", config_.temperature},
  };
  const char* token_env = config_.auth_env.empty() ? nullptr : std::getenv(config_.auth_env.c_str());

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0 && config_.retry_backoff_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.retry_backoff_ms * attempt));
    }
    requests_.fetch_add(1);
    httplib::Client client(host);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);
    if (token_env) client.set_bearer_token_auth(token_env);
    auto result = client.Post(path, request.dump(), "application/json");

    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status != 200) {
      last_error = "status " + std::to_string(result->status);
      continue;
    }
    try {
      json response = json::parse(result->body);
      std::string content =
          response.at("choices").at(0).at("message").at("content").get<std::string>();
      if (content.empty()) {
        last_error = "empty completion";
        continue;
      }
      return content;
    } catch (const json::exception& e) {
      last_error = std::string("malformed response: ") + e.what();
      continue;
    }
  }
  throw ProviderError("rewrite provider unavailable after " +
                      std::to_string(config_.max_retries + 1) + " attempts (" +
                      last_error + ")");
}

std::string RemoteChatRewriter::id() const {
  return "http-rewrite:" + config_.model + "@" + config_.endpoint;
}

RewriteCache::RewriteCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json record = json::parse(line);
      entries_[record.at("key").get<std::string>()] =
          record.at("text").get<std::string>();
    } catch (const std::exception& e) {
      throw Error("rewrite cache '" + path_ + "' line " + std::to_string(line_no) +
                  ": " + e.what());
    }
  }
}

std::optional<std::string> RewriteCache::get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void RewriteCache::put(const std::string& key, const std::string& prompt_id,
                       const std::string& text) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, text);
  if (!inserted) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error("rewrite cache: cannot append to '" + path_ + "'");
  json record{{"key", key}, {"prompt_id", prompt_id}, {"text", text}};
  out << record.dump() << '\n';
}

std::size_t RewriteCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

std::string RewriteCache::key(const std::string& provider_id,
                              const std::string& prompt_id,
                              const std::string& text) {
  return provider_id + "|" + prompt_id + "|" + to_hex(fnv1a64(text));
}

RewriteSet rewrite(const Document& doc, std::span<const RewritePrompt> prompts,
                   RewriteProvider& provider, RewriteCache* cache) {
  if (prompts.empty()) throw ConfigError("rewrite: prompt list must be non-empty");
  for (const RewritePrompt& prompt : prompts) validate_prompt(prompt);

  RewriteSet set;
  set.document_id = doc.id;
  set.provider_id = provider.id();

  std::vector<std::string> failed;
  for (const RewritePrompt& prompt : prompts) {
    std::string key = RewriteCache::key(provider.id(), prompt.id, doc.text);
    if (cache) {
      if (auto hit = cache->get(key)) {
        set.rewrites.emplace_back(prompt.id, *hit);
        continue;
      }
    }
    try {
      std::string rewritten = provider.rewrite_text(doc.text, prompt);
      if (rewritten.empty() && !doc.text.empty()) {
        // An empty model response is a failure; substituting the original
        // would saturate the edit-similarity feature.
        failed.push_back(prompt.id);
        continue;
      }
      if (cache) cache->put(key, prompt.id, rewritten);
      set.rewrites.emplace_back(prompt.id, std::move(rewritten));
    } catch (const std::exception&) {
      failed.push_back(prompt.id);
    }
  }
  if (!failed.empty()) throw RewriteError(doc.id, std::move(failed));
  return set;
}

}  // namespace stylediv
