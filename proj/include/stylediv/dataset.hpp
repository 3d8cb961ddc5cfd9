#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stylediv {

// One dataset row: a unit of text with identity, optional gold label
// (0 = human, 1 = machine) and an optional domain tag.
struct Document {
  std::string id;
  std::string text;
  std::optional<int> label;
  std::optional<std::string> domain;
};

// Streaming JSON-lines parse in file order. Each line is an object with
// fields id/text and optional label/domain. Malformed lines, duplicate ids
// and missing text raise DatasetError carrying the 1-based line number.
std::vector<Document> ingest_jsonl(const std::string& path);

// Throws DatasetError when any document lacks a label (train/evaluate mode).
void require_labels(std::span<const Document> docs);

void write_jsonl(const std::string& path, std::span<const Document> docs);

}  // namespace stylediv
