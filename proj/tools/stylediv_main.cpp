// stylediv: detects machine-generated text by measuring how much a
// document's style survives semantic-preserving rewriting.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stylediv/errors.hpp"
#include "stylediv/pipeline.hpp"

using namespace stylediv;
using nlohmann::json;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::optional<double> tau;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> rewrite_cache;
  std::optional<std::string> embedding_cache;
};

// Precedence: command-line flags > config file > built-in defaults.
PipelineConfig resolve_config(const GlobalArgs& args) {
  PipelineConfig config =
      args.config_path.empty() ? default_config() : load_config(args.config_path);
  if (args.tau) config.tau = *args.tau;
  if (args.seed) config.seed = *args.seed;
  if (args.rewrite_cache) config.paths.rewrite_cache = *args.rewrite_cache;
  if (args.embedding_cache) config.paths.embedding_cache = *args.embedding_cache;
  if (!(config.tau > 0.0 && config.tau < 1.0)) {
    throw ConfigError("tau must be in (0, 1)");
  }
  return config;
}

std::vector<std::string> prompt_ids(const PipelineConfig& config) {
  std::vector<std::string> out;
  for (const auto& prompt : config.prompts) out.push_back(prompt.id);
  return out;
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const ArtifactMismatchError*>(&e)) return "artifact-mismatch";
  if (dynamic_cast<const ModelVersionError*>(&e)) return "model-version";
  if (dynamic_cast<const ModelFormatError*>(&e)) return "model-format";
  if (dynamic_cast<const RewriteError*>(&e)) return "rewrite-failure";
  if (dynamic_cast<const ProviderError*>(&e)) return "provider-unavailable";
  if (dynamic_cast<const DatasetError*>(&e)) return "dataset";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stylediv: stylistic rewrite-divergence detector for "
               "machine-generated text"};
  app.require_subcommand(1);

  GlobalArgs globals;
  app.add_option("--config", globals.config_path, "Pipeline config file (JSON)");
  double tau_value = 0.0;
  auto* tau_opt = app.add_option("--tau", tau_value, "Decision threshold override");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Global seed override");
  std::string rewrite_cache, embedding_cache;
  auto* rc_opt = app.add_option("--rewrite-cache", rewrite_cache,
                                "Rewrite cache path override");
  auto* ec_opt = app.add_option("--embedding-cache", embedding_cache,
                                "Embedding cache path override");

  std::string input, output, model_path, features_path, rewrites_path, csv_path;

  auto* cmd_rewrite = app.add_subcommand(
      "rewrite", "Produce rewritten variants for every document");
  cmd_rewrite->add_option("--input", input, "Dataset (JSON lines)")->required();
  cmd_rewrite->add_option("--output", output, "Rewrites artifact")->required();

  auto* cmd_featurize = app.add_subcommand(
      "featurize", "Extract style feature vectors for every document");
  cmd_featurize->add_option("--input", input, "Dataset (JSON lines)")->required();
  cmd_featurize->add_option("--output", output, "Feature matrix")->required();
  cmd_featurize->add_option("--rewrites", rewrites_path,
                            "Precomputed rewrites artifact (optional)");

  auto* cmd_train =
      app.add_subcommand("train", "Train the boosted-tree detector");
  cmd_train->add_option("--features", features_path, "Labeled feature matrix")
      ->required();
  cmd_train->add_option("--output", output, "Model file")->required();

  auto* cmd_detect = app.add_subcommand(
      "detect", "Score documents and print per-document decisions");
  cmd_detect->add_option("--input", input, "Dataset (JSON lines)")->required();
  cmd_detect->add_option("--model", model_path, "Trained model file")->required();
  cmd_detect->add_option("--output", output, "Detections artifact (optional)");

  auto* cmd_evaluate = app.add_subcommand(
      "evaluate", "Evaluate a model on a labeled dataset and write a report");
  cmd_evaluate->add_option("--input", input, "Labeled dataset")->required();
  cmd_evaluate->add_option("--model", model_path, "Trained model file")->required();
  cmd_evaluate->add_option("--output", output, "Report file (JSON)")->required();
  cmd_evaluate->add_option("--csv", csv_path,
                           "Optional per-document score/feature table (CSV)");
  bool with_segments = false;
  cmd_evaluate->add_flag("--segments", with_segments,
                         "Include per-segment attributions in the report");

  auto* cmd_attribute = app.add_subcommand(
      "attribute", "Score consecutive segments of each document");
  cmd_attribute->add_option("--input", input, "Dataset (JSON lines)")->required();
  cmd_attribute->add_option("--model", model_path, "Trained model file")->required();
  cmd_attribute->add_option("--output", output, "Attributions artifact")->required();
  std::size_t max_tokens_override = 0;
  cmd_attribute->add_option("--max-tokens", max_tokens_override,
                            "Segment window size override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tau_opt->count()) globals.tau = tau_value;
    if (seed_opt->count()) globals.seed = seed_value;
    if (rc_opt->count()) globals.rewrite_cache = rewrite_cache;
    if (ec_opt->count()) globals.embedding_cache = embedding_cache;
    PipelineConfig config = resolve_config(globals);
    if (cmd_attribute->parsed() && max_tokens_override > 0) {
      config.attribution.max_tokens = max_tokens_override;
    }
    PipelineRuntime runtime(std::move(config));

    if (cmd_rewrite->parsed()) {
      auto docs = ingest_jsonl(input);
      auto sets = run_rewrite(runtime, docs);
      save_rewrites(output, runtime.hash(), prompt_ids(runtime.config()), sets);
      std::cerr << "rewrote " << sets.size() << " documents -> " << output << "\n";
    } else if (cmd_featurize->parsed()) {
      auto docs = ingest_jsonl(input);
      FeatureMatrix matrix;
      if (!rewrites_path.empty()) {
        std::string artifact_hash;
        auto sets = load_rewrites(rewrites_path, &artifact_hash);
        if (artifact_hash != runtime.hash()) {
          throw ArtifactMismatchError("featurize: rewrites hash " + artifact_hash +
                                      " does not match config hash " +
                                      runtime.hash());
        }
        matrix = run_featurize(runtime, docs, &sets);
      } else {
        matrix = run_featurize(runtime, docs);
      }
      save_feature_matrix(output, matrix);
      std::cerr << "featurized " << matrix.rows.size() << " documents -> " << output
                << "\n";
    } else if (cmd_train->parsed()) {
      FeatureMatrix matrix = load_feature_matrix(features_path);
      TreeEnsemble model = run_train(runtime, matrix);
      save_model(output, model, runtime.hash());
      std::cerr << "trained " << model.trees.size() << " trees -> " << output << "\n";
    } else if (cmd_detect->parsed()) {
      auto docs = ingest_jsonl(input);
      std::string model_hash;
      TreeEnsemble model = load_model(model_path, &model_hash);
      auto detections = run_detect(runtime, docs, model, model_hash);
      for (const Detection& d : detections) {
        json record{{"id", d.id}, {"probability", d.probability}, {"label", d.label}};
        std::cout << record.dump() << "\n";
      }
      if (!output.empty()) {
        save_detections(output, runtime.hash(), runtime.config().tau, detections);
      }
    } else if (cmd_evaluate->parsed()) {
      auto docs = ingest_jsonl(input);
      require_labels(docs);
      std::string model_hash;
      TreeEnsemble model = load_model(model_path, &model_hash);
      EvalOutput eval = run_evaluate(runtime, docs, model, model_hash);
      std::vector<SegmentAttribution> segments;
      if (with_segments) {
        segments = run_attribute(runtime, docs, model, model_hash);
      }
      save_report(output, runtime.hash(), eval, segments);
      if (!csv_path.empty()) save_score_table_csv(csv_path, eval);
      std::cerr << "auroc=" << eval.report.auroc << " best_f1=" << eval.report.best_f1
                << " -> " << output << "\n";
    } else if (cmd_attribute->parsed()) {
      auto docs = ingest_jsonl(input);
      std::string model_hash;
      TreeEnsemble model = load_model(model_path, &model_hash);
      auto attributions = run_attribute(runtime, docs, model, model_hash);
      save_attributions(output, runtime.hash(), attributions);
      std::cerr << "attributed " << attributions.size() << " documents -> " << output
                << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    json record{{"error", {{"type", error_type(e)}, {"message", e.what()}}}};
    std::cerr << record.dump() << "\n";
    return 1;
  }
}
