#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lgm/nlp.hpp"

namespace lgm {

// Strongly typed node handles. Values are dense indices assigned in
// insertion order and are stable across save/load.
#define LGM_DEFINE_ID(Name)                                      \
  struct Name {                                                  \
    std::uint32_t value = 0;                                     \
    friend auto operator<=>(const Name&, const Name&) = default; \
  };
LGM_DEFINE_ID(SectionId)
LGM_DEFINE_ID(SentenceId)
LGM_DEFINE_ID(ConceptId)
LGM_DEFINE_ID(EdgeId)
#undef LGM_DEFINE_ID

enum class RelationKind { Inheritance, Composition, Alias };
/// Invalid exists only as a reflection outcome; the graph rejects it.
enum class RelationStatus { Valid, Unknown, Invalid };

std::string_view to_string(RelationKind kind);
std::string_view to_string(RelationStatus status);
/// Throws InvalidArgument for unknown names.
RelationKind parse_relation_kind(std::string_view name);
RelationStatus parse_relation_status(std::string_view name);

struct SectionNode {
  SectionId id;
  std::string title;
  std::optional<SectionId> parent;
  int order = 0;

  friend bool operator==(const SectionNode&, const SectionNode&) = default;
};

struct SentenceNode {
  SentenceId id;
  SectionId section;
  int index = 0;
  std::string sentence;        // marked surface form, LLM-facing
  std::string sentence_lemma;  // lemmatized with marks, retrieval-facing

  friend bool operator==(const SentenceNode&, const SentenceNode&) = default;
};

struct ConceptNode {
  ConceptId id;
  std::string lemma;

  friend bool operator==(const ConceptNode&, const ConceptNode&) = default;
};

/// from/to read as child->parent, whole->component, alias A->alias B.
struct MetaEdge {
  RelationKind kind = RelationKind::Inheritance;
  ConceptId from;
  ConceptId to;
  std::vector<SentenceId> evidence;
  RelationStatus status = RelationStatus::Valid;

  friend bool operator==(const MetaEdge&, const MetaEdge&) = default;
};

struct MentionEdge {
  ConceptId concept_id;
  SentenceId sentence;

  friend bool operator==(const MentionEdge&, const MentionEdge&) = default;
};

struct GraphMetadata {
  int format_version = 1;
  std::string created;
  std::vector<std::string> sources;

  friend bool operator==(const GraphMetadata&, const GraphMetadata&) = default;
};

/// One retrieval row: a concept and a sentence that mentions it.
struct ConceptSentence {
  std::string concept_lemma;
  SentenceId sentence_id;
  std::string sentence;

  friend bool operator==(const ConceptSentence&, const ConceptSentence&) = default;
};

inline constexpr std::string_view kRootLemma = "thing";

/// The Syntactic Relation Graph (sections and sentences) together with the
/// Concept Relation Graph (concepts under the `thing` root plus
/// inheritance/composition/alias edges) and the mention edges linking them.
///
/// Single writer. Once learning is done, share it as `const LanguageGraph&`;
/// all const members are safe for concurrent readers.
class LanguageGraph {
 public:
  LanguageGraph();

  SectionId add_section(std::string title, std::optional<SectionId> parent = std::nullopt);

  /// Appends a sentence with the next index in `section` and links it to
  /// every known concept whose lemma occurs in its lemma form.
  SentenceId add_sentence(SectionId section, const AnnotatedSentence& annotated);
  SentenceId add_sentence(SectionId section, std::string sentence, std::string sentence_lemma);

  /// Returns the concept for `text`, creating it if needed. Text is matched
  /// against existing keys after normalization, then canonicalized through the
  /// lemmatizer ("Apples " -> "apple"). New concepts are linked to every
  /// existing sentence that mentions them.
  ConceptId upsert_concept(std::string_view text);
  std::optional<ConceptId> find_concept(std::string_view lemma) const;
  ConceptId root() const { return ConceptId{0}; }

  /// Stores or merges a meta-relation. Merging unions evidence and upgrades
  /// unknown to valid. Alias edges are symmetric: (A,B) and (B,A) are the
  /// same edge. Throws GraphConstraintError for self-loops, inheritance
  /// cycles and status Invalid.
  EdgeId add_meta_relation(RelationKind kind, std::string_view from, std::string_view to,
                           std::vector<SentenceId> evidence, RelationStatus status);

  /// Rows ordered by concept lemma, then section, then sentence index. A
  /// lemma matches every sentence whose lemma tokens contain it, whether or
  /// not it is a concept yet; lemmas found nowhere contribute nothing.
  std::vector<ConceptSentence> sentences_for_concepts(const std::vector<std::string>& lemmas) const;

  /// Sentences whose lemma form contains `lemma` (canonicalized like
  /// upsert_concept), whether or not a concept node exists for it yet.
  /// Ordered by sentence id.
  std::vector<SentenceId> sentences_matching(std::string_view lemma) const;

  const std::vector<SectionNode>& sections() const { return sections_; }
  const std::vector<SentenceNode>& sentences() const { return sentences_; }
  const std::vector<ConceptNode>& concepts() const { return concepts_; }
  const std::vector<MetaEdge>& meta_edges() const { return edges_; }
  const std::vector<MentionEdge>& mention_edges() const { return mentions_; }

  const SentenceNode& sentence(SentenceId id) const;
  const ConceptNode& concept_node(ConceptId id) const;
  const std::string& lemma(ConceptId id) const { return concept_node(id).lemma; }

  /// Direct neighbours in the concept relation graph.
  std::vector<ConceptId> parents(ConceptId c) const;
  std::vector<ConceptId> children(ConceptId c) const;
  std::vector<ConceptId> components(ConceptId c) const;
  std::vector<ConceptId> aliases(ConceptId c) const;

  /// Sentences mentioning the concept, in insertion order.
  const std::vector<SentenceId>& mentions_of(ConceptId c) const;

  GraphMetadata& metadata() { return metadata_; }
  const GraphMetadata& metadata() const { return metadata_; }

  friend bool operator==(const LanguageGraph& a, const LanguageGraph& b);

 private:
  friend class GraphCodec;

  struct EdgeKey {
    RelationKind kind;
    std::uint32_t from;
    std::uint32_t to;
    bool operator==(const EdgeKey&) const = default;
  };
  struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const noexcept;
  };

  ConceptId create_concept(std::string lemma);
  void index_sentence(SentenceId id);
  void link_mention(ConceptId c, SentenceId s);
  bool inheritance_reaches(ConceptId from, ConceptId target) const;
  std::vector<ConceptId> neighbours(ConceptId c, RelationKind kind, bool outgoing) const;

  std::vector<SectionNode> sections_;
  std::vector<int> section_child_count_;
  std::vector<int> section_sentence_count_;
  std::vector<SentenceNode> sentences_;
  std::vector<ConceptNode> concepts_;
  std::vector<MetaEdge> edges_;
  std::vector<MentionEdge> mentions_;
  GraphMetadata metadata_;

  std::unordered_map<std::string, ConceptId> concept_by_lemma_;
  std::unordered_map<EdgeKey, EdgeId, EdgeKeyHash> edge_by_key_;
  std::vector<std::vector<EdgeId>> out_edges_;
  std::vector<std::vector<EdgeId>> in_edges_;
  std::vector<std::vector<SentenceId>> mentions_by_concept_;
  // Lemma tokens per sentence, and first-token posting lists in both
  // directions, so mention linking never scans the whole graph.
  std::vector<std::vector<std::string>> sentence_tokens_;
  std::unordered_map<std::string, std::vector<SentenceId>> sentences_by_token_;
  std::unordered_map<std::string, std::vector<ConceptId>> concepts_by_first_token_;
  std::vector<std::vector<std::string>> concept_tokens_;
};

}  // namespace lgm
