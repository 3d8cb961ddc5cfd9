#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "stylediv/config.hpp"
#include "stylediv/dataset.hpp"
#include "support/synthetic.hpp"

using namespace stylediv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path("cli_test_" + name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null",
            const std::string& stderr_path = "/dev/null") {
  std::string command = std::string(STYLEDIV_CLI_PATH) + " " + args + " >" +
                        stdout_path + " 2>" + stderr_path;
  int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("cli end-to-end: featurize, train, detect, evaluate, attribute") {
  TempDir dir("e2e");

  auto corpus = testsupport::make_stability_corpus(12, 12, 911);
  std::vector<Document> train_docs, eval_docs;
  testsupport::split_half(corpus.machine, train_docs, eval_docs);
  testsupport::split_half(corpus.human, train_docs, eval_docs);
  write_jsonl(dir.file("train.jsonl"), train_docs);
  write_jsonl(dir.file("eval.jsonl"), eval_docs);

  PipelineConfig config = testsupport::stability_config(3);
  config.train.rounds = 15;
  save_config(dir.file("config.json"), config);
  std::string base = "--config " + dir.file("config.json");

  CHECK(run_cli(base + " rewrite --input " + dir.file("train.jsonl") +
                " --output " + dir.file("rewrites.jsonl")) == 0);

  // Featurize accepts the precomputed rewrites artifact.
  CHECK(run_cli(base + " featurize --input " + dir.file("train.jsonl") +
                " --rewrites " + dir.file("rewrites.jsonl") + " --output " +
                dir.file("features.jsonl")) == 0);

  CHECK(run_cli(base + " train --features " + dir.file("features.jsonl") +
                " --output " + dir.file("model.json")) == 0);

  std::string detect_out = dir.file("detect_stdout.txt");
  CHECK(run_cli(base + " detect --input " + dir.file("eval.jsonl") + " --model " +
                    dir.file("model.json") + " --output " + dir.file("detections.jsonl"),
                detect_out) == 0);

  // stdout carries one {id, probability, label} record per document.
  std::ifstream lines(detect_out);
  std::string line;
  std::size_t count = 0;
  std::size_t correct = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    json record = json::parse(line);
    CHECK(record.contains("id"));
    CHECK(record.contains("probability"));
    CHECK(record.contains("label"));
    if (record["label"].get<int>() == *eval_docs[count].label) ++correct;
    ++count;
  }
  CHECK(count == eval_docs.size());
  CHECK(static_cast<double>(correct) / static_cast<double>(count) >= 0.95);

  CHECK(run_cli(base + " evaluate --input " + dir.file("eval.jsonl") + " --model " +
                dir.file("model.json") + " --output " + dir.file("report.json") +
                " --csv " + dir.file("table.csv")) == 0);
  json report = json::parse(slurp(dir.file("report.json")));
  CHECK(report["auroc"].get<double>() >= 0.95);
  CHECK(report.contains("divergences"));
  CHECK(!slurp(dir.file("table.csv")).empty());

  CHECK(run_cli(base + " attribute --input " + dir.file("eval.jsonl") + " --model " +
                dir.file("model.json") + " --output " + dir.file("attr.jsonl") +
                " --max-tokens 32") == 0);
  CHECK(!slurp(dir.file("attr.jsonl")).empty());
}

TEST_CASE("cli refuses artifacts with mismatched config hashes") {
  TempDir dir("mismatch");
  auto corpus = testsupport::make_stability_corpus(4, 4, 912);
  std::vector<Document> docs = corpus.machine;
  docs.insert(docs.end(), corpus.human.begin(), corpus.human.end());
  write_jsonl(dir.file("docs.jsonl"), docs);

  PipelineConfig config = testsupport::stability_config(3);
  config.train.rounds = 3;
  save_config(dir.file("config.json"), config);
  PipelineConfig other = config;
  other.features.n2 = 5;
  save_config(dir.file("other.json"), other);

  CHECK(run_cli("--config " + dir.file("config.json") + " featurize --input " +
                dir.file("docs.jsonl") + " --output " + dir.file("features.jsonl")) == 0);
  CHECK(run_cli("--config " + dir.file("config.json") + " train --features " +
                dir.file("features.jsonl") + " --output " + dir.file("model.json")) == 0);

  // Detecting under a different feature config must fail with a
  // machine-readable artifact-mismatch record.
  std::string err = dir.file("stderr.txt");
  CHECK(run_cli("--config " + dir.file("other.json") + " detect --input " +
                    dir.file("docs.jsonl") + " --model " + dir.file("model.json"),
                "/dev/null", err) == 1);
  json record = json::parse(slurp(err));
  CHECK(record["error"]["type"] == "artifact-mismatch");

  // Same for training on a foreign feature matrix.
  CHECK(run_cli("--config " + dir.file("other.json") + " train --features " +
                    dir.file("features.jsonl") + " --output " + dir.file("m2.json"),
                "/dev/null", err) == 1);
  CHECK(json::parse(slurp(err))["error"]["type"] == "artifact-mismatch");
}

TEST_CASE("cli reports dataset errors with nonzero status") {
  TempDir dir("dataset_err");
  {
    std::ofstream out(dir.file("bad.jsonl"));
    out << R"({"id":"a","text":"fine"})" << "\n";
    out << "not json" << "\n";
  }
  std::string err = dir.file("stderr.txt");
  CHECK(run_cli("featurize --input " + dir.file("bad.jsonl") + " --output " +
                    dir.file("f.jsonl"),
                "/dev/null", err) == 1);
  json record = json::parse(slurp(err));
  CHECK(record["error"]["type"] == "dataset");
  CHECK(record["error"]["message"].get<std::string>().find("line 2") !=
        std::string::npos);

  // Training demands labels.
  {
    std::ofstream out(dir.file("unlabeled.jsonl"));
    out << R"({"id":"a","text":"alpha beta gamma."})" << "\n";
    out << R"({"id":"b","text":"delta epsilon zeta."})" << "\n";
  }
  CHECK(run_cli("featurize --input " + dir.file("unlabeled.jsonl") + " --output " +
                dir.file("u.jsonl")) == 0);
  CHECK(run_cli("train --features " + dir.file("u.jsonl") + " --output " +
                    dir.file("m.json"),
                "/dev/null", err) == 1);

  // Evaluating an unlabeled dataset is refused too.
  CHECK(run_cli("evaluate --input " + dir.file("unlabeled.jsonl") + " --model " +
                    dir.file("m.json") + " --output " + dir.file("r.json"),
                "/dev/null", err) == 1);
}

TEST_CASE("cli featurize is idempotent through its caches") {
  TempDir dir("idempotent");
  auto corpus = testsupport::make_stability_corpus(3, 3, 913);
  std::vector<Document> docs = corpus.machine;
  docs.insert(docs.end(), corpus.human.begin(), corpus.human.end());
  write_jsonl(dir.file("docs.jsonl"), docs);

  PipelineConfig config = testsupport::stability_config(3);
  config.paths.rewrite_cache = dir.file("rewrites.cache");
  config.paths.embedding_cache = dir.file("embeddings.cache");
  save_config(dir.file("config.json"), config);
  std::string base = "--config " + dir.file("config.json");

  CHECK(run_cli(base + " featurize --input " + dir.file("docs.jsonl") +
                " --output " + dir.file("f1.jsonl")) == 0);
  std::string rewrite_cache = slurp(dir.file("rewrites.cache"));
  std::string embed_cache = slurp(dir.file("embeddings.cache"));
  CHECK(!rewrite_cache.empty());

  CHECK(run_cli(base + " featurize --input " + dir.file("docs.jsonl") +
                " --output " + dir.file("f2.jsonl")) == 0);
  // Second run: identical output, caches untouched (pure cache hits).
  CHECK(slurp(dir.file("f1.jsonl")) == slurp(dir.file("f2.jsonl")));
  CHECK(slurp(dir.file("rewrites.cache")) == rewrite_cache);
  CHECK(slurp(dir.file("embeddings.cache")) == embed_cache);
}

TEST_CASE("cli flag overrides take precedence over the config file") {
  TempDir dir("overrides");
  auto corpus = testsupport::make_stability_corpus(3, 3, 914);
  std::vector<Document> docs = corpus.machine;
  docs.insert(docs.end(), corpus.human.begin(), corpus.human.end());
  write_jsonl(dir.file("docs.jsonl"), docs);

  PipelineConfig config = testsupport::stability_config(3);
  config.train.rounds = 3;
  save_config(dir.file("config.json"), config);
  std::string base = "--config " + dir.file("config.json");

  CHECK(run_cli(base + " featurize --input " + dir.file("docs.jsonl") +
                " --output " + dir.file("features.jsonl")) == 0);
  CHECK(run_cli(base + " train --features " + dir.file("features.jsonl") +
                " --output " + dir.file("model.json")) == 0);

  // tau is runtime-only: an extreme threshold flips everything negative
  // without invalidating the model's config hash.
  std::string out = dir.file("stdout.txt");
  CHECK(run_cli(base + " --tau 0.999999 detect --input " + dir.file("docs.jsonl") +
                    " --model " + dir.file("model.json"),
                out) == 0);
  std::ifstream lines(out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    CHECK(json::parse(line)["label"].get<int>() == 0);
  }

  // An invalid tau is a config error.
  std::string err = dir.file("stderr.txt");
  CHECK(run_cli(base + " --tau 1.5 detect --input " + dir.file("docs.jsonl") +
                    " --model " + dir.file("model.json"),
                "/dev/null", err) == 1);
  CHECK(json::parse(slurp(err))["error"]["type"] == "config");
}
