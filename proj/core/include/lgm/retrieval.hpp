#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lgm/error.hpp"
#include "lgm/graph.hpp"
#include "lgm/llm.hpp"
#include "lgm/prompts.hpp"

namespace lgm {

struct RetrievalConfig {
  std::size_t chunk_size = 30000;  // K, characters of serialized payload
  int max_iterations = 4;          // I_max
  int max_compressions = 3;        // J_max
  std::size_t parallelism = 4;
  bool allow_model_knowledge = true;
  ChatParams chat;
  const PromptCatalog* prompts = nullptr;  // null: built-in catalog

  /// Throws InvalidArgument unless K >= 1000, I_max >= 1, J_max >= 0 and
  /// parallelism >= 1.
  void validate() const;
};

/// One (concept, sentence) pair fed to the model.
struct EvidenceRow {
  std::string concept_lemma;
  std::string sentence;

  friend bool operator==(const EvidenceRow&, const EvidenceRow&) = default;
};

/// Concept -> sentences, in first-insertion order, without duplicate
/// sentences per concept. Serializes to the concept-descriptions object the
/// prompts embed (two-space indented JSON); its length in characters is what
/// every budget is measured against.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(const std::vector<EvidenceRow>& rows);

  /// Returns false if the pair was already present.
  bool add(std::string_view concept_lemma, std::string_view sentence);
  void merge(const SupportSet& other);
  bool contains(std::string_view concept_lemma, std::string_view sentence) const;
  bool contains_sentence(std::string_view sentence) const;

  bool empty() const { return entries_.empty(); }
  std::size_t sentence_count() const;
  std::vector<EvidenceRow> rows() const;
  const std::vector<std::pair<std::string, std::vector<std::string>>>& entries() const { return entries_; }

  std::string to_json() const;
  std::size_t length() const;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::pair<std::string, std::vector<std::string>>> entries_;
};

/// Characters of the serialized payload for `rows` (same as
/// SupportSet(rows).length(), computed without building the string).
std::size_t payload_length(const std::vector<EvidenceRow>& rows);

struct Chunk {
  std::vector<EvidenceRow> rows;
  std::size_t length = 0;
  bool oversize = false;  // a single row that alone exceeds K
};

/// Greedy packing in input order. Rows are never split; a row that alone
/// exceeds K becomes its own chunk.
std::vector<Chunk> chunk_rows(const std::vector<EvidenceRow>& rows, std::size_t k);

/// One line of the retrieval trace.
struct TraceEvent {
  std::string step;  // extract, expand, retrieve, chunk, mark, compress, prune, answer, warning, error, done
  int iteration = 0;
  int compression = -1;
  std::string call_id;
  std::string digest;
  std::size_t count = 0;        // rows, chunks or sentences, depending on step
  std::size_t size_before = 0;  // serialized S
  std::size_t size_after = 0;
  std::vector<std::string> lemmas;
  std::string message;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace);

struct FinalAnswer {
  std::string answer;
  std::vector<std::string> unsupported_concepts;
  SupportSet supports;
  int iterations_used = 0;
  std::vector<TraceEvent> trace;
};

std::string final_answer_to_json(const FinalAnswer& answer, bool with_trace = false);

/// A sub-step failed in a way the algorithm cannot skip (transport error,
/// unreadable final answer). Carries the trace up to the failure.
class RetrievalError : public Error {
 public:
  RetrievalError(const std::string& what, std::vector<TraceEvent> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<TraceEvent>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceEvent> trace_;
};

inline constexpr std::string_view kReaskObjectMessage =
    "Your previous reply could not be parsed. Reply again with only the JSON object in the required "
    "output format and nothing else.";

/// Text bound to the merge prompt's model-knowledge placeholder.
std::string_view model_knowledge_clause(bool allowed);

/// Asks which chunk sentences support `question`. Citations that are not
/// verbatim chunk sentences are dropped with a warning event. A reply that
/// stays malformed after one re-ask skips the chunk with an error event.
SupportSet mark_supporting(const Chunk& chunk, std::string_view question, const SupportSet& already,
                           ChatClient& llm, const RetrievalConfig& config, std::string_view call_id,
                           std::vector<TraceEvent>& events, int iteration = 0);

/// Re-chunks S and keeps what the model still cites. Result is a subset of S.
SupportSet compress(const SupportSet& s, std::string_view question, ChatClient& llm,
                    const RetrievalConfig& config, std::vector<TraceEvent>& events, int iteration = 0,
                    int step = 0);

/// Keeps the sentences closest to the question by ROUGE-L until the next
/// would overflow K; ties go to the earlier sentence. Order within S is kept.
SupportSet prune_by_rouge(const SupportSet& s, std::string_view question, std::size_t k);

struct AnswerResult {
  std::string answer;
  std::vector<std::string> unsupported_concepts;
  SupportSet supports;
};

/// Parses a merge reply. Throws ResponseParseError.
AnswerResult parse_answer(std::string_view reply);

/// Throws RetrievalError when the reply is malformed twice.
AnswerResult answer(std::string_view question, const SupportSet& s, ChatClient& llm,
                    const RetrievalConfig& config, std::vector<TraceEvent>& events, int iteration = 0);

/// Concept lemmas for missing-concept phrases: noun lemmas of each phrase,
/// or the whole phrase canonicalized when it has none.
std::vector<std::string> concepts_from_missing(const std::vector<std::string>& phrases);

/// The concept iterative retrieval loop.
FinalAnswer run_query(std::string_view question, const LanguageGraph& graph, ChatClient& llm,
                      const RetrievalConfig& config = {});

}  // namespace lgm
