#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lgm {

/// Universal-style part-of-speech tags produced by the built-in tagger.
enum class Pos {
  Noun,
  PropNoun,
  Pronoun,
  Verb,
  Aux,
  Adj,
  Adv,
  Adp,
  Det,
  CConj,
  SConj,
  Num,
  Part,
  Punct,
  Other,
};

std::string_view pos_name(Pos pos);
/// Accepts the names produced by pos_name ("NOUN", "PROPN", ...). Unknown -> Other.
Pos parse_pos(std::string_view name);
inline bool is_nominal(Pos pos) {
  return pos == Pos::Noun || pos == Pos::PropNoun;
}

struct Token {
  std::string surface;
  std::string lemma;
  Pos pos = Pos::Other;

  friend bool operator==(const Token&, const Token&) = default;
};

/// A resolved pronoun. `token` indexes AnnotatedSentence::tokens.
struct CorefMark {
  std::string pronoun;
  std::size_t token = 0;
  std::string antecedent;
  std::string antecedent_lemma;

  friend bool operator==(const CorefMark&, const CorefMark&) = default;
};

/// One sentence in both renderings. `surface` carries inline marks right
/// after each resolved pronoun; `lemma_form` is the space-joined token lemmas
/// with all marks appended after the sentence terminal.
///
///   surface:    "It [: Apple ] is sweet."
///   lemma_form: "it be sweet . [: apple ]"
struct AnnotatedSentence {
  std::string surface;
  std::string lemma_form;
  std::vector<Token> tokens;
  std::vector<CorefMark> marks;

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

/// Produces annotated sentences from raw document text.
class Annotator {
 public:
  virtual ~Annotator() = default;
  /// Throws InvalidArgument on empty text.
  virtual std::vector<AnnotatedSentence> annotate(std::string_view doc_id, std::string_view raw) = 0;
};

/// Deterministic rule-based annotator: terminal-punctuation sentence split,
/// lexicon + suffix lemmatizer, lexicon + suffix POS tagger, and
/// third-person pronoun resolution against the subject-most agreeing noun
/// phrase of the same or previous sentence.
class BuiltinAnnotator final : public Annotator {
 public:
  std::vector<AnnotatedSentence> annotate(std::string_view doc_id, std::string_view raw) override;
};

/// Convenience wrapper over BuiltinAnnotator.
std::vector<AnnotatedSentence> annotate(std::string_view raw);

/// Lemma of a single word given its tag. Lowercased.
std::string lemmatize_word(std::string_view word, Pos pos);

/// Canonical concept key for a free-text entity name: tokens lemmatized,
/// leading determiners/possessives dropped, normalized.
/// "Apples " -> "apple", "An apple" -> "apple", "Men" -> "man".
std::string canonical_concept(std::string_view phrase);

/// Noun and proper-noun lemmas in first-occurrence order, deduplicated.
/// Runs of two or more proper nouns are also emitted as one joined lemma
/// right after the run's members.
std::vector<std::string> extract_noun_lemmas(std::string_view text);

/// True iff the concept's lemma tokens occur contiguously in the sentence's
/// lemma tokens (text inside coreference marks included).
bool lemma_matches(std::string_view concept_lemma, std::string_view sentence_lemma_form);
bool lemma_matches(const std::vector<std::string>& concept_tokens,
                   const std::vector<std::string>& sentence_tokens);

/// "[: " + antecedent + " ]"
std::string format_mark(std::string_view antecedent);

/// Antecedents of all `[: ... ]` marks in order.
std::vector<std::string> mark_antecedents(std::string_view text);

/// Every "[:" is closed by a later "]" and marks do not nest.
bool marks_balanced(std::string_view text);

/// Removes every mark (and one adjoining space) from the text.
std::string strip_marks(std::string_view text);

}  // namespace lgm
