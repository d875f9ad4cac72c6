#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lgm/graph.hpp"
#include "lgm/llm.hpp"
#include "lgm/nlp.hpp"
#include "lgm/prompts.hpp"

namespace lgm {

enum class CandidateStatus { Pending, Valid, Invalid, Unknown };
std::string_view to_string(CandidateStatus s);

/// One extracted meta-relation. `subject` is the subclass, the whole or
/// alias A; `objects` holds the parent class, the components or alias B.
/// Entity names are already coreference-resolved and canonical lemmas.
struct RelationCandidate {
  RelationKind kind = RelationKind::Inheritance;
  std::string sentence;
  std::string subject;
  std::vector<std::string> objects;
  CandidateStatus status = CandidateStatus::Pending;

  friend bool operator==(const RelationCandidate&, const RelationCandidate&) = default;
};

struct ReflectionVerdict {
  RelationStatus status = RelationStatus::Unknown;
  std::string rationale;  // raw model reply; empty when the LLM was not asked
};

struct ExtractOptions {
  ChatParams chat;
  const PromptCatalog* prompts = nullptr;  // null: built-in catalog
};

/// Sent as a follow-up user turn when a structured reply does not parse.
inline constexpr std::string_view kReaskMessage =
    "Your previous reply could not be parsed. Reply again with only the JSON array in the "
    "required output format and nothing else.";
inline constexpr std::string_view kReaskVerdictMessage =
    "Your previous reply could not be parsed. Reply with exactly one word: valid, invalid or unknown.";

/// Runs the extraction prompt for `kind` over the window's marked sentences.
/// Throws ResponseParseError if the reply is malformed twice; LlmError
/// propagates.
std::vector<RelationCandidate> extract_relations(RelationKind kind,
                                                 const std::vector<AnnotatedSentence>& window,
                                                 ChatClient& llm, const ExtractOptions& options = {});

/// Parses an extraction reply. Throws ResponseParseError.
std::vector<RelationCandidate> parse_extraction(RelationKind kind, std::string_view reply);

/// Resolves an entity name the model returned: marks and bare pronouns map
/// to their antecedent in `sentence`, then the name is canonicalized. A bare
/// pronoun the sentence does not resolve gives "".
std::string resolve_entity(std::string_view entity, std::string_view sentence);

/// Lemmas whose presence marks a sentence as stating a relation of `kind`.
const std::vector<std::string>& trigger_lemmas(RelationKind kind);

struct ReflectionEvidence {
  std::vector<SentenceId> kept;
  std::vector<SentenceId> removed;  // sentences that state the candidate itself
};

/// Sentences mentioning any endpoint, split into those the reflection
/// prompt may see and those it must not.
ReflectionEvidence reflection_evidence(const RelationCandidate& candidate, const LanguageGraph& graph);

/// Asks the model to judge the candidate against the kept evidence. No kept
/// evidence means Unknown without a call. Throws ResponseParseError if the
/// verdict is unreadable twice.
ReflectionVerdict reflect(const RelationCandidate& candidate, const LanguageGraph& graph, ChatClient& llm,
                          const ExtractOptions& options = {});

/// Reads a verdict word. Returns false if the reply is not one.
bool parse_verdict(std::string_view reply, RelationStatus& out);

struct LearnConfig {
  bool reflect = false;
  std::size_t window_size = 12;
  std::size_t parallelism = 4;
  ExtractOptions extract;
};

/// candidates == accepted + rejected + unknown + failures always holds.
/// A window whose extraction reply stayed malformed counts as one failed
/// candidate; so does a candidate whose verdict was unreadable or which the
/// graph refused (self-loop, inheritance cycle).
struct LearnReport {
  std::size_t sentences = 0;
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t unknown = 0;
  std::size_t failures = 0;
  std::vector<std::string> problems;

  LearnReport& operator+=(const LearnReport& other);
  bool balanced() const { return candidates == accepted + rejected + unknown + failures; }
};

struct Document {
  std::string id;
  std::vector<AnnotatedSentence> sentences;
};

/// Stores the document's sentences under a new section titled with its id,
/// extracts all three relation kinds over fixed windows, optionally
/// reflects, and stores valid and unknown relations. An empty document
/// leaves the graph untouched. LlmError propagates with the document id.
LearnReport learn_document(const Document& doc, LanguageGraph& graph, ChatClient& llm,
                           const LearnConfig& config = {});

/// Annotates `raw` first.
LearnReport learn_text(std::string_view doc_id, std::string_view raw, Annotator& annotator,
                       LanguageGraph& graph, ChatClient& llm, const LearnConfig& config = {});

}  // namespace lgm
