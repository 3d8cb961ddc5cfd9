#include "stylediv/dataset.hpp"

#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "stylediv/errors.hpp"

namespace stylediv {

using nlohmann::json;

std::vector<Document> ingest_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset '" + path + "'");

  std::vector<Document> docs;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw DatasetError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw DatasetError("expected a JSON object", line_no);
    if (!record.contains("id") || !record["id"].is_string()) {
      throw DatasetError("missing string field 'id'", line_no);
    }
    Document doc;
    doc.id = record["id"].get<std::string>();
    if (!seen_ids.insert(doc.id).second) {
      throw DatasetError("duplicate id '" + doc.id + "'", line_no);
    }
    if (!record.contains("text") || !record["text"].is_string()) {
      throw DatasetError("missing string field 'text'", line_no);
    }
    doc.text = record["text"].get<std::string>();
    if (record.contains("label") && !record["label"].is_null()) {
      if (!record["label"].is_number_integer()) {
        throw DatasetError("label must be 0 or 1", line_no);
      }
      int label = record["label"].get<int>();
      if (label != 0 && label != 1) throw DatasetError("label must be 0 or 1", line_no);
      if (doc.text.empty()) {
        throw DatasetError("labeled record has empty text", line_no);
      }
      doc.label = label;
    }
    if (record.contains("domain") && record["domain"].is_string()) {
      doc.domain = record["domain"].get<std::string>();
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void require_labels(std::span<const Document> docs) {
  for (const Document& doc : docs) {
    if (!doc.label) {
      throw DatasetError("document '" + doc.id + "' has no label");
    }
  }
}

void write_jsonl(const std::string& path, std::span<const Document> docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot open '" + path + "' for writing");
  for (const Document& doc : docs) {
    json record{{"id", doc.id}, {"text", doc.text}};
    if (doc.label) record["label"] = *doc.label;
    if (doc.domain) record["domain"] = *doc.domain;
    out << record.dump() << '\n';
  }
}

}  // namespace stylediv
