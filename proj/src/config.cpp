#include "stylediv/config.hpp"

#include <fstream>

#include "json.hpp"
#include "stylediv/errors.hpp"
#include "stylediv/util.hpp"

namespace stylediv {

using nlohmann::json;

PipelineConfig default_config() { return PipelineConfig{}; }

namespace {

EditGranularity granularity_from_string(const std::string& name) {
  if (name == "word") return EditGranularity::word;
  if (name == "character") return EditGranularity::character;
  throw ConfigError("unknown edit granularity '" + name + "'");
}

std::string to_string(EditGranularity granularity) {
  return granularity == EditGranularity::word ? "word" : "character";
}

void reject_unknown_keys(const json& object, std::initializer_list<const char*> known,
                         const std::string& section) {
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + section);
  }
}

DeterministicRuleConfig rule_from_json(const json& j, const std::string& section) {
  reject_unknown_keys(j, {"rule", "rate", "window"}, section);
  DeterministicRuleConfig rule;
  if (j.contains("rule")) rule.rule = rewrite_rule_from_string(j["rule"].get<std::string>());
  if (j.contains("rate")) rule.rate = j["rate"].get<double>();
  if (j.contains("window")) rule.window = j["window"].get<std::size_t>();
  return rule;
}

json rule_to_json(const DeterministicRuleConfig& rule) {
  return json{{"rule", to_string(rule.rule)},
              {"rate", rule.rate},
              {"window", rule.window}};
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }

  PipelineConfig config;
  reject_unknown_keys(doc,
                      {"tokenizer", "features", "prompts", "rewriter", "embedding",
                       "train", "tau", "seed", "paths", "attribution"},
                      "config");

  if (doc.contains("tokenizer")) {
    const json& j = doc["tokenizer"];
    reject_unknown_keys(j, {"lowercase"}, "tokenizer");
    if (j.contains("lowercase")) config.features.tokenizer.lowercase = j["lowercase"].get<bool>();
  }

  if (doc.contains("features")) {
    const json& j = doc["features"];
    reject_unknown_keys(
        j, {"n1", "n2", "alpha", "beta", "normalize_overlap", "edit_granularity",
            "average_rewrites"},
        "features");
    if (j.contains("n1")) config.features.n1 = j["n1"].get<std::size_t>();
    if (j.contains("n2")) config.features.n2 = j["n2"].get<std::size_t>();
    if (j.contains("alpha")) config.features.alpha = j["alpha"].get<double>();
    if (j.contains("beta")) config.features.beta = j["beta"].get<double>();
    if (j.contains("normalize_overlap")) {
      config.features.normalize_overlap = j["normalize_overlap"].get<bool>();
    }
    if (j.contains("edit_granularity")) {
      config.features.granularity =
          granularity_from_string(j["edit_granularity"].get<std::string>());
    }
    if (j.contains("average_rewrites")) {
      config.features.average_rewrites = j["average_rewrites"].get<bool>();
    }
  }

  if (doc.contains("prompts")) {
    config.prompts.clear();
    for (const json& jp : doc["prompts"]) {
      reject_unknown_keys(jp, {"id", "template"}, "prompt");
      RewritePrompt prompt{jp.at("id").get<std::string>(),
                           jp.at("template").get<std::string>()};
      validate_prompt(prompt);
      config.prompts.push_back(std::move(prompt));
    }
    if (config.prompts.empty()) throw ConfigError("prompts must be non-empty");
  }

  if (doc.contains("rewriter")) {
    const json& j = doc["rewriter"];
    reject_unknown_keys(j,
                        {"kind", "seed", "rules", "default_rule", "endpoint", "model",
                         "auth_env", "temperature", "timeout_ms", "max_retries",
                         "retry_backoff_ms", "max_workers"},
                        "rewriter");
    std::string kind = j.value("kind", "deterministic");
    if (kind == "deterministic") {
      config.rewriter.kind = RewriterKind::deterministic;
    } else if (kind == "remote-http") {
      config.rewriter.kind = RewriterKind::remote_http;
    } else {
      throw ConfigError("unknown rewriter kind '" + kind + "'");
    }
    if (j.contains("seed")) config.rewriter.deterministic.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("default_rule")) {
      config.rewriter.deterministic.default_rule =
          rule_from_json(j["default_rule"], "rewriter.default_rule");
    }
    if (j.contains("rules")) {
      for (const auto& [prompt_id, jr] : j["rules"].items()) {
        config.rewriter.deterministic.rules[prompt_id] =
            rule_from_json(jr, "rewriter.rules." + prompt_id);
      }
    }
    if (j.contains("endpoint")) config.rewriter.remote.endpoint = j["endpoint"].get<std::string>();
    if (j.contains("model")) config.rewriter.remote.model = j["model"].get<std::string>();
    if (j.contains("auth_env")) config.rewriter.remote.auth_env = j["auth_env"].get<std::string>();
    if (j.contains("temperature")) config.rewriter.remote.temperature = j["temperature"].get<double>();
    if (j.contains("timeout_ms")) config.rewriter.remote.timeout_ms = j["timeout_ms"].get<int>();
    if (j.contains("max_retries")) config.rewriter.remote.max_retries = j["max_retries"].get<int>();
    if (j.contains("retry_backoff_ms")) {
      config.rewriter.remote.retry_backoff_ms = j["retry_backoff_ms"].get<int>();
    }
    if (j.contains("max_workers")) config.rewriter.max_workers = j["max_workers"].get<unsigned>();
  }

  if (doc.contains("embedding")) {
    const json& j = doc["embedding"];
    reject_unknown_keys(j,
                        {"kind", "dim", "seed", "endpoint", "model", "auth_env",
                         "timeout_ms", "max_retries", "retry_backoff_ms",
                         "max_in_flight"},
                        "embedding");
    std::string kind = j.value("kind", "deterministic-local");
    if (kind == "deterministic-local") {
      config.embedding.kind = EmbedderKind::deterministic_local;
    } else if (kind == "remote-http") {
      config.embedding.kind = EmbedderKind::remote_http;
    } else {
      throw ConfigError("unknown embedding kind '" + kind + "'");
    }
    if (j.contains("dim")) config.embedding.dim = j["dim"].get<std::size_t>();
    if (j.contains("seed")) config.embedding.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("endpoint")) config.embedding.endpoint = j["endpoint"].get<std::string>();
    if (j.contains("model")) config.embedding.model = j["model"].get<std::string>();
    if (j.contains("auth_env")) config.embedding.auth_env = j["auth_env"].get<std::string>();
    if (j.contains("timeout_ms")) config.embedding.timeout_ms = j["timeout_ms"].get<int>();
    if (j.contains("max_retries")) config.embedding.max_retries = j["max_retries"].get<int>();
    if (j.contains("retry_backoff_ms")) {
      config.embedding.retry_backoff_ms = j["retry_backoff_ms"].get<int>();
    }
    if (j.contains("max_in_flight")) config.embedding.max_in_flight = j["max_in_flight"].get<int>();
  }

  if (doc.contains("train")) {
    const json& j = doc["train"];
    reject_unknown_keys(j,
                        {"rounds", "learning_rate", "max_depth", "lambda", "gamma",
                         "min_samples_leaf", "seed"},
                        "train");
    if (j.contains("rounds")) config.train.rounds = j["rounds"].get<int>();
    if (j.contains("learning_rate")) config.train.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("max_depth")) config.train.max_depth = j["max_depth"].get<int>();
    if (j.contains("lambda")) config.train.lambda = j["lambda"].get<double>();
    if (j.contains("gamma")) config.train.gamma = j["gamma"].get<double>();
    if (j.contains("min_samples_leaf")) {
      config.train.min_samples_leaf = j["min_samples_leaf"].get<int>();
    }
    if (j.contains("seed")) config.train.seed = j["seed"].get<std::uint64_t>();
  }

  if (doc.contains("tau")) config.tau = doc["tau"].get<double>();
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();

  if (doc.contains("paths")) {
    const json& j = doc["paths"];
    reject_unknown_keys(j, {"rewrite_cache", "embedding_cache"}, "paths");
    if (j.contains("rewrite_cache")) config.paths.rewrite_cache = j["rewrite_cache"].get<std::string>();
    if (j.contains("embedding_cache")) {
      config.paths.embedding_cache = j["embedding_cache"].get<std::string>();
    }
  }

  if (doc.contains("attribution")) {
    const json& j = doc["attribution"];
    reject_unknown_keys(j, {"max_tokens", "aggregate"}, "attribution");
    if (j.contains("max_tokens")) config.attribution.max_tokens = j["max_tokens"].get<std::size_t>();
    if (j.contains("aggregate")) {
      std::string agg = j["aggregate"].get<std::string>();
      if (agg == "mean") {
        config.attribution.aggregate_max = false;
      } else if (agg == "max") {
        config.attribution.aggregate_max = true;
      } else {
        throw ConfigError("unknown attribution aggregate '" + agg + "'");
      }
    }
  }

  if (!(config.tau > 0.0 && config.tau < 1.0)) {
    throw ConfigError("tau must be in (0, 1)");
  }
  return config;
}

namespace {

json config_to_json(const PipelineConfig& config) {
  json prompts = json::array();
  for (const RewritePrompt& p : config.prompts) {
    prompts.push_back({{"id", p.id}, {"template", p.template_text}});
  }
  json rules = json::object();
  for (const auto& [pid, rule] : config.rewriter.deterministic.rules) {
    rules[pid] = rule_to_json(rule);
  }
  return json{
      {"tokenizer", {{"lowercase", config.features.tokenizer.lowercase}}},
      {"features",
       {{"n1", config.features.n1},
        {"n2", config.features.n2},
        {"alpha", config.features.alpha},
        {"beta", config.features.beta},
        {"normalize_overlap", config.features.normalize_overlap},
        {"edit_granularity", to_string(config.features.granularity)},
        {"average_rewrites", config.features.average_rewrites}}},
      {"prompts", prompts},
      {"rewriter",
       {{"kind", config.rewriter.kind == RewriterKind::deterministic ? "deterministic"
                                                                     : "remote-http"},
        {"seed", config.rewriter.deterministic.seed},
        {"default_rule", rule_to_json(config.rewriter.deterministic.default_rule)},
        {"rules", rules},
        {"endpoint", config.rewriter.remote.endpoint},
        {"model", config.rewriter.remote.model},
        {"auth_env", config.rewriter.remote.auth_env},
        {"temperature", config.rewriter.remote.temperature},
        {"timeout_ms", config.rewriter.remote.timeout_ms},
        {"max_retries", config.rewriter.remote.max_retries},
        {"retry_backoff_ms", config.rewriter.remote.retry_backoff_ms},
        {"max_workers", config.rewriter.max_workers}}},
      {"embedding",
       {{"kind", config.embedding.kind == EmbedderKind::deterministic_local
                     ? "deterministic-local"
                     : "remote-http"},
        {"dim", config.embedding.dim},
        {"seed", config.embedding.seed},
        {"endpoint", config.embedding.endpoint},
        {"model", config.embedding.model},
        {"auth_env", config.embedding.auth_env},
        {"timeout_ms", config.embedding.timeout_ms},
        {"max_retries", config.embedding.max_retries},
        {"retry_backoff_ms", config.embedding.retry_backoff_ms},
        {"max_in_flight", config.embedding.max_in_flight}}},
      {"train",
       {{"rounds", config.train.rounds},
        {"learning_rate", config.train.learning_rate},
        {"max_depth", config.train.max_depth},
        {"lambda", config.train.lambda},
        {"gamma", config.train.gamma},
        {"min_samples_leaf", config.train.min_samples_leaf},
        {"seed", config.train.seed}}},
      {"tau", config.tau},
      {"seed", config.seed},
      {"paths",
       {{"rewrite_cache", config.paths.rewrite_cache},
        {"embedding_cache", config.paths.embedding_cache}}},
      {"attribution",
       {{"max_tokens", config.attribution.max_tokens},
        {"aggregate", config.attribution.aggregate_max ? "max" : "mean"}}},
  };
}

}  // namespace

void save_config(const std::string& path, const PipelineConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << config_to_json(config).dump(2) << '\n';
}

std::string canonical_config(const PipelineConfig& config) {
  json full = config_to_json(config);
  json canonical{
      {"tokenizer", full["tokenizer"]},
      {"features", full["features"]},
      {"prompts", full["prompts"]},
      {"rewriter",
       {{"kind", full["rewriter"]["kind"]},
        {"seed", full["rewriter"]["seed"]},
        {"default_rule", full["rewriter"]["default_rule"]},
        {"rules", full["rewriter"]["rules"]},
        {"model", full["rewriter"]["model"]},
        {"temperature", full["rewriter"]["temperature"]}}},
      {"embedding",
       {{"kind", full["embedding"]["kind"]},
        {"dim", full["embedding"]["dim"]},
        {"seed", full["embedding"]["seed"]},
        {"model", full["embedding"]["model"]}}},
      {"train", full["train"]},
      {"seed", config.seed},
  };
  return canonical.dump();
}

std::string config_hash(const PipelineConfig& config) {
  return to_hex(fnv1a64(canonical_config(config)));
}

}  // namespace stylediv
