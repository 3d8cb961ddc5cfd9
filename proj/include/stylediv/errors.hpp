#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stylediv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dataset parse failures carry the 1-based line number of the offending row.
class DatasetError : public Error {
 public:
  DatasetError(const std::string& message, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_ = 0;
};

// Remote provider unavailable after bounded retries.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& message, std::string document_id = {})
      : Error(message), document_id_(std::move(document_id)) {}

  const std::string& document_id() const noexcept { return document_id_; }

 private:
  std::string document_id_;
};

// Partial rewrite result: some prompts failed for a document.
class RewriteError : public Error {
 public:
  RewriteError(std::string document_id, std::vector<std::string> failed_prompts)
      : Error("rewrite failed for document '" + document_id + "' on prompts: " +
              join(failed_prompts)),
        document_id_(std::move(document_id)),
        failed_prompts_(std::move(failed_prompts)) {}

  const std::string& document_id() const noexcept { return document_id_; }
  const std::vector<std::string>& failed_prompts() const noexcept {
    return failed_prompts_;
  }

 private:
  static std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
      if (!out.empty()) out += ", ";
      out += p;
    }
    return out;
  }

  std::string document_id_;
  std::vector<std::string> failed_prompts_;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class ModelVersionError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

// Two artifacts with different canonical config hashes were combined.
class ArtifactMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace stylediv
