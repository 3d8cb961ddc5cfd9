#include "stylediv/pipeline.hpp"

#include <fstream>

#include "json.hpp"
#include "stylediv/errors.hpp"
#include "stylediv/util.hpp"

namespace stylediv {

using nlohmann::json;

PipelineRuntime::PipelineRuntime(PipelineConfig config)
    : config_(std::move(config)), hash_(config_hash(config_)) {
  if (config_.prompts.empty()) throw ConfigError("config has no prompts");
  for (const RewritePrompt& prompt : config_.prompts) validate_prompt(prompt);

  if (config_.rewriter.kind == RewriterKind::deterministic) {
    DeterministicRewriterConfig det = config_.rewriter.deterministic;
    det.seed = fnv1a64_mix(det.seed, config_.seed);  // fold in the global seed
    rewriter_ = std::make_unique<DeterministicRewriteProvider>(std::move(det));
  } else {
    rewriter_ = std::make_unique<RemoteChatRewriter>(config_.rewriter.remote);
  }

  EmbedderConfig embed_cfg = config_.embedding;
  embed_cfg.cache_path = config_.paths.embedding_cache;
  embedder_ = make_embedder(embed_cfg, config_.features.tokenizer);

  if (!config_.paths.rewrite_cache.empty()) {
    rewrite_cache_ = std::make_unique<RewriteCache>(config_.paths.rewrite_cache);
  }
}

ScoringPipeline PipelineRuntime::scoring(const TreeEnsemble& model) const {
  ScoringPipeline pipeline;
  pipeline.features = config_.features;
  pipeline.prompts = config_.prompts;
  pipeline.rewriter = rewriter_.get();
  pipeline.embedder = embedder_.get();
  pipeline.rewrite_cache = rewrite_cache_.get();
  pipeline.model = &model;
  pipeline.tau = config_.tau;
  pipeline.max_workers = config_.rewriter.max_workers;
  return pipeline;
}

std::vector<RewriteSet> run_rewrite(PipelineRuntime& runtime,
                                    std::span<const Document> docs) {
  std::vector<RewriteSet> sets(docs.size());
  parallel_for(docs.size(), runtime.config().rewriter.max_workers, [&](std::size_t i) {
    sets[i] = rewrite(docs[i], runtime.config().prompts, runtime.rewriter(),
                      runtime.rewrite_cache());
  });
  return sets;
}

void save_rewrites(const std::string& path, const std::string& config_hash,
                   std::span<const std::string> prompt_ids,
                   std::span<const RewriteSet> sets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_rewrites: cannot open '" + path + "'");
  json meta{{"meta",
             {{"config_hash", config_hash},
              {"prompt_ids", std::vector<std::string>(prompt_ids.begin(), prompt_ids.end())}}}};
  out << meta.dump() << '\n';
  for (const RewriteSet& set : sets) {
    json rewrites = json::array();
    for (const auto& [prompt_id, text] : set.rewrites) {
      rewrites.push_back({{"prompt_id", prompt_id}, {"text", text}});
    }
    json record{{"document_id", set.document_id},
                {"provider_id", set.provider_id},
                {"rewrites", std::move(rewrites)}};
    out << record.dump() << '\n';
  }
}

std::vector<RewriteSet> load_rewrites(const std::string& path,
                                      std::string* config_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_rewrites: cannot open '" + path + "'");
  std::vector<RewriteSet> sets;
  std::string line;
  std::size_t line_no = 0;
  bool have_meta = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
      if (!have_meta) {
        if (!record.contains("meta")) throw Error("missing leading meta record");
        if (config_hash) {
          *config_hash = record["meta"].value("config_hash", std::string{});
        }
        have_meta = true;
        continue;
      }
      RewriteSet set;
      set.document_id = record.at("document_id").get<std::string>();
      set.provider_id = record.value("provider_id", std::string{});
      for (const json& jr : record.at("rewrites")) {
        set.rewrites.emplace_back(jr.at("prompt_id").get<std::string>(),
                                  jr.at("text").get<std::string>());
      }
      sets.push_back(std::move(set));
    } catch (const json::exception& e) {
      throw Error("rewrites '" + path + "' line " + std::to_string(line_no) + ": " +
                  e.what());
    }
  }
  if (!have_meta) throw Error("rewrites '" + path + "': empty file");
  return sets;
}

FeatureMatrix run_featurize(PipelineRuntime& runtime, std::span<const Document> docs,
                            const std::vector<RewriteSet>* precomputed) {
  if (precomputed && precomputed->size() != docs.size()) {
    throw ArtifactMismatchError(
        "featurize: rewrite artifact does not cover the input corpus");
  }

  FeatureMatrix matrix;
  matrix.config_hash = runtime.hash();
  for (const RewritePrompt& prompt : runtime.config().prompts) {
    matrix.prompt_ids.push_back(prompt.id);
  }
  matrix.n1 = runtime.config().features.n1;
  matrix.n2 = runtime.config().features.n2;
  matrix.alpha = runtime.config().features.alpha;
  matrix.beta = runtime.config().features.beta;
  matrix.rows.resize(docs.size());

  parallel_for(docs.size(), runtime.config().rewriter.max_workers, [&](std::size_t i) {
    RewriteSet set = precomputed
                         ? (*precomputed)[i]
                         : rewrite(docs[i], runtime.config().prompts,
                                   runtime.rewriter(), runtime.rewrite_cache());
    if (precomputed && set.document_id != docs[i].id) {
      throw ArtifactMismatchError("featurize: rewrite artifact document order "
                                  "does not match the input corpus");
    }
    StyleFeatureVector vec =
        featurize(docs[i], set, runtime.config().features, runtime.embedder());
    matrix.rows[i] =
        FeatureMatrix::Row{docs[i].id, docs[i].label, std::move(vec.flattened)};
  });
  return matrix;
}

TreeEnsemble run_train(PipelineRuntime& runtime, const FeatureMatrix& matrix,
                       std::vector<double>* round_losses) {
  if (matrix.config_hash != runtime.hash()) {
    throw ArtifactMismatchError("train: feature matrix hash " + matrix.config_hash +
                                " does not match config hash " + runtime.hash());
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  rows.reserve(matrix.rows.size());
  labels.reserve(matrix.rows.size());
  for (const FeatureMatrix::Row& row : matrix.rows) {
    if (!row.label) {
      throw DatasetError("train: document '" + row.document_id + "' has no label");
    }
    rows.push_back(row.flattened);
    labels.push_back(*row.label);
  }
  return train(rows, labels, runtime.config().train, round_losses);
}

namespace {

void check_model_hash(const PipelineRuntime& runtime, const std::string& model_hash,
                      const char* op) {
  if (!model_hash.empty() && model_hash != runtime.hash()) {
    throw ArtifactMismatchError(std::string(op) + ": model hash " + model_hash +
                                " does not match config hash " + runtime.hash());
  }
}

}  // namespace

std::vector<Detection> run_detect(PipelineRuntime& runtime,
                                  std::span<const Document> docs,
                                  const TreeEnsemble& model,
                                  const std::string& model_hash) {
  check_model_hash(runtime, model_hash, "detect");
  FeatureMatrix matrix = run_featurize(runtime, docs);
  std::vector<Detection> detections;
  detections.reserve(docs.size());
  for (const FeatureMatrix::Row& row : matrix.rows) {
    Prediction pred = predict_label(model, row.flattened, runtime.config().tau);
    detections.push_back(Detection{row.document_id, pred.probability, pred.label});
  }
  return detections;
}

void save_detections(const std::string& path, const std::string& config_hash,
                     double tau, std::span<const Detection> detections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_detections: cannot open '" + path + "'");
  json meta{{"meta", {{"config_hash", config_hash}, {"tau", tau}}}};
  out << meta.dump() << '\n';
  for (const Detection& d : detections) {
    json record{{"id", d.id}, {"probability", d.probability}, {"label", d.label}};
    out << record.dump() << '\n';
  }
}

EvalOutput run_evaluate(PipelineRuntime& runtime, std::span<const Document> docs,
                        const TreeEnsemble& model, const std::string& model_hash) {
  check_model_hash(runtime, model_hash, "evaluate");
  require_labels(docs);

  EvalOutput output;
  output.features = run_featurize(runtime, docs);

  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<std::vector<double>> feature_rows;
  scores.reserve(docs.size());
  for (const FeatureMatrix::Row& row : output.features.rows) {
    Prediction pred = predict_label(model, row.flattened, runtime.config().tau);
    output.detections.push_back(Detection{row.document_id, pred.probability, pred.label});
    scores.push_back(pred.probability);
    labels.push_back(*row.label);
    feature_rows.push_back(row.flattened);
  }
  output.report = evaluate_scores(scores, labels, feature_rows);
  return output;
}

void save_report(const std::string& path, const std::string& config_hash,
                 const EvalOutput& output, std::span<const SegmentAttribution> segments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_report: cannot open '" + path + "'");

  const EvalReport& report = output.report;
  json per_dimension = json::array();
  for (const DivergencePair& pair : report.divergences.per_dimension) {
    per_dimension.push_back({{"kl", pair.kl}, {"hellinger", pair.hellinger}});
  }
  json doc{
      {"config_hash", config_hash},
      {"auroc", report.auroc},
      {"best_f1", report.best_f1},
      {"best_threshold", report.best_threshold},
      {"confusion",
       {{"tp", report.confusion.tp},
        {"fp", report.confusion.fp},
        {"tn", report.confusion.tn},
        {"fn", report.confusion.fn}}},
      {"n_pos", report.n_pos},
      {"n_neg", report.n_neg},
      {"divergences",
       {{"kl_score", report.divergences.kl_score},
        {"hellinger_score", report.divergences.hellinger_score},
        {"kl_feature", report.divergences.kl_feature},
        {"hellinger_feature", report.divergences.hellinger_feature},
        {"per_dimension", std::move(per_dimension)},
        {"bins", report.divergences.bin_count},
        {"epsilon", report.divergences.epsilon}}},
  };
  if (!segments.empty()) {
    json table = json::array();
    for (const SegmentAttribution& attribution : segments) {
      json spans = json::array();
      for (const SegmentScore& s : attribution.segments) {
        json record{{"begin", s.span.begin},
                    {"end", s.span.end},
                    {"probability", s.probability}};
        if (s.failed) record["error"] = s.error;
        spans.push_back(std::move(record));
      }
      table.push_back({{"document_id", attribution.document_id},
                       {"aggregate", attribution.aggregate},
                       {"segments", std::move(spans)}});
    }
    doc["segments"] = std::move(table);
  }
  out << doc.dump(2) << '\n';
}

void save_score_table_csv(const std::string& path, const EvalOutput& output) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_score_table_csv: cannot open '" + path + "'");
  std::size_t dim = output.features.rows.empty()
                        ? 0
                        : output.features.rows.front().flattened.size();
  out << "document_id,label,score";
  for (std::size_t d = 0; d < dim; ++d) out << ",f" << d;
  out << '\n';
  for (std::size_t i = 0; i < output.features.rows.size(); ++i) {
    const FeatureMatrix::Row& row = output.features.rows[i];
    out << row.document_id << ',' << (row.label ? std::to_string(*row.label) : "")
        << ',' << output.detections[i].probability;
    for (double v : row.flattened) out << ',' << v;
    out << '\n';
  }
}

std::vector<SegmentAttribution> run_attribute(PipelineRuntime& runtime,
                                              std::span<const Document> docs,
                                              const TreeEnsemble& model,
                                              const std::string& model_hash) {
  check_model_hash(runtime, model_hash, "attribute");
  ScoringPipeline pipeline = runtime.scoring(model);
  std::vector<SegmentAttribution> out;
  out.reserve(docs.size());
  for (const Document& doc : docs) {
    out.push_back(attribute_segments(doc, pipeline,
                                     runtime.config().attribution.max_tokens,
                                     runtime.config().attribution.aggregate_max));
  }
  return out;
}

void save_attributions(const std::string& path, const std::string& config_hash,
                       std::span<const SegmentAttribution> attributions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_attributions: cannot open '" + path + "'");
  json meta{{"meta", {{"config_hash", config_hash}}}};
  out << meta.dump() << '\n';
  for (const SegmentAttribution& attribution : attributions) {
    json spans = json::array();
    for (const SegmentScore& s : attribution.segments) {
      json record{{"begin", s.span.begin},
                  {"end", s.span.end},
                  {"probability", s.probability}};
      if (s.failed) record["error"] = s.error;
      spans.push_back(std::move(record));
    }
    json record{{"document_id", attribution.document_id},
                {"aggregate", attribution.aggregate},
                {"segments", std::move(spans)}};
    out << record.dump() << '\n';
  }
}

}  // namespace stylediv
