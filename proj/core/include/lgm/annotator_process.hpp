#pragma once

#include <chrono>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "lgm/nlp.hpp"

namespace lgm {

/// Runs an external NLP toolkit as a child process speaking one JSON object
/// per line over stdin/stdout (docs/annotator_protocol.md):
///
///   -> {"doc_id": "...", "text": "..."}
///   <- {"sentences": [{"surface": ..., "lemma_form": ..., "tokens": [...], "marks": [...]}]}
///   <- {"error": "..."}
///
/// Calls are serialized. Any failure raises AnnotatorError; there is no
/// silent fallback to the built-in annotator.
class ProcessAnnotator final : public Annotator {
 public:
  explicit ProcessAnnotator(std::vector<std::string> argv,
                            std::chrono::milliseconds timeout = std::chrono::seconds(60));
  ~ProcessAnnotator() override;
  ProcessAnnotator(const ProcessAnnotator&) = delete;
  ProcessAnnotator& operator=(const ProcessAnnotator&) = delete;

  std::vector<AnnotatedSentence> annotate(std::string_view doc_id, std::string_view raw) override;

 private:
  std::string read_line();
  void shutdown();

  std::vector<std::string> argv_;
  std::chrono::milliseconds timeout_;
  int fd_ = -1;
  int pid_ = -1;
  std::string buffer_;
  std::mutex mu_;
};

std::string annotation_request(std::string_view doc_id, std::string_view text);

/// Decodes a `{"sentences": [...]}` object. Tokens and marks are optional;
/// `surface` and `lemma_form` are required and must have balanced marks.
/// Throws FormatError.
std::vector<AnnotatedSentence> parse_annotated_sentences(std::string_view json_text);
std::string annotated_sentences_to_json(const std::vector<AnnotatedSentence>& sentences);

/// A pre-annotated document file uses the response schema and bypasses
/// annotation entirely.
std::vector<AnnotatedSentence> load_preannotated(const std::filesystem::path& path);

}  // namespace lgm
