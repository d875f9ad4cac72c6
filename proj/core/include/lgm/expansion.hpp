#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lgm/graph.hpp"

namespace lgm {

using LabelSet = std::set<std::string>;

/// Attribute (A), ability (B) and action (Act) labels of one concept.
struct ConceptSemantics {
  std::string concept_lemma;
  LabelSet attributes;
  LabelSet abilities;
  LabelSet actions;
};

/// Concept semantics plus the relations the representation algebra reads:
/// parents P(c), children C(c), components Comp(c) and aliases Alias(c).
/// Every lemma named by a relation gets an entry, possibly empty.
class SemanticsMap {
 public:
  /// Replaces the label sets for `sem.concept_lemma`. Labels are normalized.
  void set(ConceptSemantics sem);
  void add_inheritance(std::string_view child, std::string_view parent);
  void add_composition(std::string_view whole, std::string_view component);
  void add_alias(std::string_view a, std::string_view b);

  /// Relations copied from the graph's concept layer; label sets start empty.
  static SemanticsMap from_graph(const LanguageGraph& graph);

  bool contains(std::string_view lemma) const;
  /// Throws NotFound for unknown lemmas.
  const ConceptSemantics& at(std::string_view lemma) const;
  const std::set<std::string>& parents(std::string_view lemma) const;
  const std::set<std::string>& children(std::string_view lemma) const;
  const std::set<std::string>& components(std::string_view lemma) const;
  const std::set<std::string>& aliases(std::string_view lemma) const;
  std::vector<std::string> lemmas() const;

 private:
  struct Entry {
    ConceptSemantics sem;
    std::set<std::string> parents, children, components, aliases;
  };
  Entry& entry(std::string_view lemma);
  const Entry& find(std::string_view lemma) const;

  std::map<std::string, Entry, std::less<>> entries_;
};

/// S_c = A ∪ B ∪ Act.
LabelSet basic_representation(const ConceptSemantics& sem);
/// S_c plus parents' attributes and abilities, the attributes shared by all
/// children (empty when there are none) and the components' abilities.
LabelSet extended_representation(std::string_view lemma, const SemanticsMap& map);
/// Union of extended representations over the whole alias component.
LabelSet full_representation(std::string_view lemma, const SemanticsMap& map);
/// The alias connected component containing `lemma`, itself included.
std::set<std::string> alias_component(std::string_view lemma, const SemanticsMap& map);

enum class Provenance { Seed, Alias, Parent, Child, Component };
std::string_view to_string(Provenance p);

struct ExpandedMember {
  std::string lemma;
  Provenance provenance = Provenance::Seed;

  friend bool operator==(const ExpandedMember&, const ExpandedMember&) = default;
};

struct ExpandedConceptSet {
  std::vector<std::string> seeds;       // normalized, sorted, unique
  std::vector<ExpandedMember> members;  // sorted by lemma

  std::vector<std::string> lemmas() const;
};

/// Seeds, their alias components, and one hop of parents, children and
/// components from every alias-class member. `thing` is never added as a
/// parent. Each member keeps the strongest provenance in the order
/// seed > alias > parent > child > component.
ExpandedConceptSet expand(const std::vector<std::string>& seeds, const LanguageGraph& graph);

}  // namespace lgm
