#include "lgm/graph.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

#include "lgm/error.hpp"
#include "lgm/text.hpp"

namespace lgm {

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::Inheritance: return "inheritance";
    case RelationKind::Composition: return "composition";
    case RelationKind::Alias: return "alias";
  }
  return "inheritance";
}

std::string_view to_string(RelationStatus status) {
  switch (status) {
    case RelationStatus::Valid: return "valid";
    case RelationStatus::Unknown: return "unknown";
    case RelationStatus::Invalid: return "invalid";
  }
  return "valid";
}

RelationKind parse_relation_kind(std::string_view name) {
  if (name == "inheritance") return RelationKind::Inheritance;
  if (name == "composition") return RelationKind::Composition;
  if (name == "alias") return RelationKind::Alias;
  throw InvalidArgument("unknown relation kind: " + std::string(name));
}

RelationStatus parse_relation_status(std::string_view name) {
  if (name == "valid") return RelationStatus::Valid;
  if (name == "unknown") return RelationStatus::Unknown;
  if (name == "invalid") return RelationStatus::Invalid;
  throw InvalidArgument("unknown relation status: " + std::string(name));
}

std::size_t LanguageGraph::EdgeKeyHash::operator()(const EdgeKey& k) const noexcept {
  std::size_t h = static_cast<std::size_t>(k.kind);
  h = h * 1000003u ^ k.from;
  h = h * 1000003u ^ k.to;
  return h;
}

LanguageGraph::LanguageGraph() {
  create_concept(std::string(kRootLemma));
}

SectionId LanguageGraph::add_section(std::string title, std::optional<SectionId> parent) {
  int order = 0;
  if (parent) {
    if (parent->value >= sections_.size()) {
      throw NotFound("unknown parent section id " + std::to_string(parent->value));
    }
    order = section_child_count_[parent->value]++;
  } else {
    order = static_cast<int>(
        std::count_if(sections_.begin(), sections_.end(), [](const SectionNode& s) { return !s.parent; }));
  }
  SectionId id{static_cast<std::uint32_t>(sections_.size())};
  sections_.push_back({id, std::move(title), parent, order});
  section_child_count_.push_back(0);
  section_sentence_count_.push_back(0);
  return id;
}

SentenceId LanguageGraph::add_sentence(SectionId section, const AnnotatedSentence& annotated) {
  return add_sentence(section, annotated.surface, annotated.lemma_form);
}

SentenceId LanguageGraph::add_sentence(SectionId section, std::string sentence, std::string sentence_lemma) {
  if (section.value >= sections_.size()) {
    throw NotFound("unknown section id " + std::to_string(section.value));
  }
  if (trim(sentence).empty() || trim(sentence_lemma).empty()) {
    throw InvalidArgument("add_sentence: empty sentence");
  }
  if (!marks_balanced(sentence) || !marks_balanced(sentence_lemma)) {
    throw InvalidArgument("add_sentence: unclosed coreference mark in \"" + sentence + "\"");
  }
  SentenceId id{static_cast<std::uint32_t>(sentences_.size())};
  int index = section_sentence_count_[section.value]++;
  sentences_.push_back({id, section, index, std::move(sentence), std::move(sentence_lemma)});
  index_sentence(id);

  // Link every known concept whose first token occurs in the sentence.
  const auto& toks = sentence_tokens_[id.value];
  std::set<std::uint32_t> matched;
  std::unordered_set<std::string_view> seen;
  for (const auto& tok : toks) {
    if (!seen.insert(tok).second) continue;
    auto it = concepts_by_first_token_.find(tok);
    if (it == concepts_by_first_token_.end()) continue;
    for (auto c : it->second) {
      if (lemma_matches(concept_tokens_[c.value], toks)) matched.insert(c.value);
    }
  }
  for (auto c : matched) link_mention(ConceptId{c}, id);
  return id;
}

void LanguageGraph::index_sentence(SentenceId id) {
  sentence_tokens_.push_back(lemma_tokens(sentences_[id.value].sentence_lemma));
  std::unordered_set<std::string> uniq(sentence_tokens_.back().begin(), sentence_tokens_.back().end());
  for (const auto& t : uniq) sentences_by_token_[t].push_back(id);
}

void LanguageGraph::link_mention(ConceptId c, SentenceId s) {
  mentions_.push_back({c, s});
  mentions_by_concept_[c.value].push_back(s);
}

ConceptId LanguageGraph::create_concept(std::string lemma) {
  ConceptId id{static_cast<std::uint32_t>(concepts_.size())};
  concepts_.push_back({id, lemma});
  concept_by_lemma_.emplace(lemma, id);
  out_edges_.emplace_back();
  in_edges_.emplace_back();
  mentions_by_concept_.emplace_back();
  concept_tokens_.push_back(lemma_tokens(lemma));
  if (!concept_tokens_.back().empty()) {
    concepts_by_first_token_[concept_tokens_.back().front()].push_back(id);
  }
  return id;
}

ConceptId LanguageGraph::upsert_concept(std::string_view text) {
  auto key = normalize_lemma(text);
  if (key.empty()) throw InvalidArgument("upsert_concept: empty lemma");
  if (auto found = find_concept(key)) return *found;
  auto lemma = canonical_concept(key);
  if (lemma.empty()) throw InvalidArgument("upsert_concept: empty lemma");
  if (auto found = find_concept(lemma)) return *found;

  auto id = create_concept(lemma);
  const auto& ctoks = concept_tokens_[id.value];
  if (ctoks.empty()) return id;
  auto it = sentences_by_token_.find(ctoks.front());
  if (it == sentences_by_token_.end()) return id;
  for (auto s : it->second) {
    if (lemma_matches(ctoks, sentence_tokens_[s.value])) link_mention(id, s);
  }
  return id;
}

std::optional<ConceptId> LanguageGraph::find_concept(std::string_view lemma) const {
  auto it = concept_by_lemma_.find(normalize_lemma(lemma));
  if (it == concept_by_lemma_.end()) return std::nullopt;
  return it->second;
}

bool LanguageGraph::inheritance_reaches(ConceptId from, ConceptId target) const {
  std::vector<bool> seen(concepts_.size(), false);
  std::vector<ConceptId> stack{from};
  while (!stack.empty()) {
    auto c = stack.back();
    stack.pop_back();
    if (c == target) return true;
    if (seen[c.value]) continue;
    seen[c.value] = true;
    for (auto e : out_edges_[c.value]) {
      const auto& edge = edges_[e.value];
      if (edge.kind == RelationKind::Inheritance) stack.push_back(edge.to);
    }
  }
  return false;
}

EdgeId LanguageGraph::add_meta_relation(RelationKind kind, std::string_view from_text,
                                        std::string_view to_text, std::vector<SentenceId> evidence,
                                        RelationStatus status) {
  if (status == RelationStatus::Invalid) {
    throw GraphConstraintError("invalid relations are discarded, not stored");
  }
  for (auto s : evidence) {
    if (s.value >= sentences_.size()) {
      throw NotFound("unknown evidence sentence id " + std::to_string(s.value));
    }
  }
  auto from = upsert_concept(from_text);
  auto to = upsert_concept(to_text);
  if (from == to) {
    throw GraphConstraintError("self-loop " + std::string(to_string(kind)) + " on '" +
                               concepts_[from.value].lemma + "'");
  }

  auto it = edge_by_key_.find({kind, from.value, to.value});
  if (it == edge_by_key_.end() && kind == RelationKind::Alias) {
    it = edge_by_key_.find({kind, to.value, from.value});
  }
  if (it != edge_by_key_.end()) {
    auto& edge = edges_[it->second.value];
    for (auto s : evidence) {
      if (std::find(edge.evidence.begin(), edge.evidence.end(), s) == edge.evidence.end()) {
        edge.evidence.push_back(s);
      }
    }
    if (status == RelationStatus::Valid) edge.status = RelationStatus::Valid;
    return it->second;
  }

  if (kind == RelationKind::Inheritance && inheritance_reaches(to, from)) {
    throw GraphConstraintError("inheritance cycle: '" + concepts_[to.value].lemma +
                               "' already inherits from '" + concepts_[from.value].lemma + "'");
  }

  // Evidence is kept unique in first-seen order.
  std::vector<SentenceId> uniq;
  for (auto s : evidence) {
    if (std::find(uniq.begin(), uniq.end(), s) == uniq.end()) uniq.push_back(s);
  }
  EdgeId id{static_cast<std::uint32_t>(edges_.size())};
  edges_.push_back({kind, from, to, std::move(uniq), status});
  edge_by_key_.emplace(EdgeKey{kind, from.value, to.value}, id);
  out_edges_[from.value].push_back(id);
  in_edges_[to.value].push_back(id);
  return id;
}

std::vector<ConceptSentence> LanguageGraph::sentences_for_concepts(
    const std::vector<std::string>& lemmas) const {
  std::set<std::string> keys;
  for (const auto& l : lemmas) {
    auto k = normalize_lemma(l);
    if (!k.empty()) keys.insert(std::move(k));
  }
  std::vector<ConceptSentence> rows;
  for (const auto& key : keys) {
    auto ids = sentences_matching(key);
    std::stable_sort(ids.begin(), ids.end(), [&](SentenceId a, SentenceId b) {
      const auto& sa = sentences_[a.value];
      const auto& sb = sentences_[b.value];
      if (sa.section != sb.section) return sa.section < sb.section;
      return sa.index < sb.index;
    });
    for (auto s : ids) rows.push_back({key, s, sentences_[s.value].sentence});
  }
  return rows;
}

std::vector<SentenceId> LanguageGraph::sentences_matching(std::string_view lemma) const {
  auto key = normalize_lemma(lemma);
  if (key.empty()) return {};
  if (auto c = find_concept(key)) {
    auto ids = mentions_by_concept_[c->value];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }
  auto toks = lemma_tokens(canonical_concept(key));
  std::vector<SentenceId> out;
  if (toks.empty()) return out;
  auto it = sentences_by_token_.find(toks.front());
  if (it == sentences_by_token_.end()) return out;
  for (auto s : it->second) {
    if (lemma_matches(toks, sentence_tokens_[s.value])) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const SentenceNode& LanguageGraph::sentence(SentenceId id) const {
  if (id.value >= sentences_.size()) throw NotFound("unknown sentence id " + std::to_string(id.value));
  return sentences_[id.value];
}

const ConceptNode& LanguageGraph::concept_node(ConceptId id) const {
  if (id.value >= concepts_.size()) throw NotFound("unknown concept id " + std::to_string(id.value));
  return concepts_[id.value];
}

std::vector<ConceptId> LanguageGraph::neighbours(ConceptId c, RelationKind kind, bool outgoing) const {
  std::vector<ConceptId> out;
  const auto& list = outgoing ? out_edges_.at(c.value) : in_edges_.at(c.value);
  for (auto e : list) {
    const auto& edge = edges_[e.value];
    if (edge.kind == kind) out.push_back(outgoing ? edge.to : edge.from);
  }
  return out;
}

std::vector<ConceptId> LanguageGraph::parents(ConceptId c) const {
  return neighbours(c, RelationKind::Inheritance, true);
}

std::vector<ConceptId> LanguageGraph::children(ConceptId c) const {
  return neighbours(c, RelationKind::Inheritance, false);
}

std::vector<ConceptId> LanguageGraph::components(ConceptId c) const {
  return neighbours(c, RelationKind::Composition, true);
}

std::vector<ConceptId> LanguageGraph::aliases(ConceptId c) const {
  auto out = neighbours(c, RelationKind::Alias, true);
  auto in = neighbours(c, RelationKind::Alias, false);
  out.insert(out.end(), in.begin(), in.end());
  return out;
}

const std::vector<SentenceId>& LanguageGraph::mentions_of(ConceptId c) const {
  return mentions_by_concept_.at(c.value);
}

bool operator==(const LanguageGraph& a, const LanguageGraph& b) {
  return a.sections_ == b.sections_ && a.sentences_ == b.sentences_ && a.concepts_ == b.concepts_ &&
         a.edges_ == b.edges_ && a.mentions_ == b.mentions_ && a.metadata_ == b.metadata_;
}

}  // namespace lgm
