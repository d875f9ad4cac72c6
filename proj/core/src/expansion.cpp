#include "lgm/expansion.hpp"

#include <algorithm>
#include <deque>

#include "lgm/error.hpp"
#include "lgm/nlp.hpp"
#include "lgm/text.hpp"

namespace lgm {

namespace {

LabelSet normalized(const LabelSet& in) {
  LabelSet out;
  for (const auto& l : in) {
    auto n = normalize_lemma(l);
    if (!n.empty()) out.insert(std::move(n));
  }
  return out;
}

std::string key_of(std::string_view lemma) {
  auto k = normalize_lemma(lemma);
  if (k.empty()) throw InvalidArgument("empty concept lemma");
  return k;
}

}  // namespace

SemanticsMap::Entry& SemanticsMap::entry(std::string_view lemma) {
  auto k = key_of(lemma);
  auto it = entries_.find(k);
  if (it == entries_.end()) {
    it = entries_.emplace(k, Entry{}).first;
    it->second.sem.concept_lemma = k;
  }
  return it->second;
}

const SemanticsMap::Entry& SemanticsMap::find(std::string_view lemma) const {
  auto it = entries_.find(normalize_lemma(lemma));
  if (it == entries_.end()) throw NotFound("no semantics entry for concept '" + std::string(lemma) + "'");
  return it->second;
}

void SemanticsMap::set(ConceptSemantics sem) {
  auto& e = entry(sem.concept_lemma);
  e.sem.attributes = normalized(sem.attributes);
  e.sem.abilities = normalized(sem.abilities);
  e.sem.actions = normalized(sem.actions);
}

void SemanticsMap::add_inheritance(std::string_view child, std::string_view parent) {
  entry(child).parents.insert(key_of(parent));
  entry(parent).children.insert(key_of(child));
}

void SemanticsMap::add_composition(std::string_view whole, std::string_view component) {
  entry(component);
  entry(whole).components.insert(key_of(component));
}

void SemanticsMap::add_alias(std::string_view a, std::string_view b) {
  entry(a).aliases.insert(key_of(b));
  entry(b).aliases.insert(key_of(a));
}

SemanticsMap SemanticsMap::from_graph(const LanguageGraph& graph) {
  SemanticsMap map;
  for (const auto& c : graph.concepts()) map.entry(c.lemma);
  for (const auto& e : graph.meta_edges()) {
    const auto& from = graph.lemma(e.from);
    const auto& to = graph.lemma(e.to);
    switch (e.kind) {
      case RelationKind::Inheritance: map.add_inheritance(from, to); break;
      case RelationKind::Composition: map.add_composition(from, to); break;
      case RelationKind::Alias: map.add_alias(from, to); break;
    }
  }
  return map;
}

bool SemanticsMap::contains(std::string_view lemma) const {
  return entries_.contains(normalize_lemma(lemma));
}
const ConceptSemantics& SemanticsMap::at(std::string_view lemma) const {
  return find(lemma).sem;
}
const std::set<std::string>& SemanticsMap::parents(std::string_view lemma) const {
  return find(lemma).parents;
}
const std::set<std::string>& SemanticsMap::children(std::string_view lemma) const {
  return find(lemma).children;
}
const std::set<std::string>& SemanticsMap::components(std::string_view lemma) const {
  return find(lemma).components;
}
const std::set<std::string>& SemanticsMap::aliases(std::string_view lemma) const {
  return find(lemma).aliases;
}

std::vector<std::string> SemanticsMap::lemmas() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : entries_) out.push_back(k);
  return out;
}

LabelSet basic_representation(const ConceptSemantics& sem) {
  LabelSet out = sem.attributes;
  out.insert(sem.abilities.begin(), sem.abilities.end());
  out.insert(sem.actions.begin(), sem.actions.end());
  return out;
}

LabelSet extended_representation(std::string_view lemma, const SemanticsMap& map) {
  auto out = basic_representation(map.at(lemma));
  for (const auto& p : map.parents(lemma)) {
    const auto& sp = map.at(p);
    out.insert(sp.attributes.begin(), sp.attributes.end());
    out.insert(sp.abilities.begin(), sp.abilities.end());
  }
  const auto& kids = map.children(lemma);
  if (!kids.empty()) {
    LabelSet common = map.at(*kids.begin()).attributes;
    for (const auto& h : kids) {
      const auto& attrs = map.at(h).attributes;
      LabelSet next;
      std::set_intersection(common.begin(), common.end(), attrs.begin(), attrs.end(),
                            std::inserter(next, next.end()));
      common = std::move(next);
    }
    out.insert(common.begin(), common.end());
  }
  for (const auto& m : map.components(lemma)) {
    const auto& sm = map.at(m);
    out.insert(sm.abilities.begin(), sm.abilities.end());
  }
  return out;
}

std::set<std::string> alias_component(std::string_view lemma, const SemanticsMap& map) {
  std::set<std::string> seen{map.at(lemma).concept_lemma};
  std::deque<std::string> queue(seen.begin(), seen.end());
  while (!queue.empty()) {
    auto cur = std::move(queue.front());
    queue.pop_front();
    for (const auto& a : map.aliases(cur)) {
      if (seen.insert(a).second) queue.push_back(a);
    }
  }
  return seen;
}

LabelSet full_representation(std::string_view lemma, const SemanticsMap& map) {
  LabelSet out;
  for (const auto& a : alias_component(lemma, map)) {
    auto ext = extended_representation(a, map);
    out.insert(ext.begin(), ext.end());
  }
  return out;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Seed: return "seed";
    case Provenance::Alias: return "alias";
    case Provenance::Parent: return "parent";
    case Provenance::Child: return "child";
    case Provenance::Component: return "component";
  }
  return "seed";
}

std::vector<std::string> ExpandedConceptSet::lemmas() const {
  std::vector<std::string> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.lemma);
  return out;
}

ExpandedConceptSet expand(const std::vector<std::string>& seeds, const LanguageGraph& graph) {
  std::map<std::string, Provenance> found;
  auto offer = [&](const std::string& lemma, Provenance p) {
    auto [it, fresh] = found.emplace(lemma, p);
    if (!fresh && p < it->second) it->second = p;
  };

  std::set<std::string> seed_keys;
  for (const auto& s : seeds) {
    // Known keys are used as-is; free text is canonicalized like upsert_concept.
    auto k = normalize_lemma(s);
    if (k.empty()) continue;
    if (!graph.find_concept(k)) {
      auto canon = canonical_concept(k);
      if (!canon.empty()) k = std::move(canon);
    }
    seed_keys.insert(std::move(k));
  }
  for (const auto& k : seed_keys) offer(k, Provenance::Seed);

  // Alias components of the known seeds.
  std::set<std::uint32_t> klass;
  std::deque<ConceptId> queue;
  for (const auto& k : seed_keys) {
    if (auto c = graph.find_concept(k); c && klass.insert(c->value).second) queue.push_back(*c);
  }
  while (!queue.empty()) {
    auto c = queue.front();
    queue.pop_front();
    for (auto a : graph.aliases(c)) {
      if (klass.insert(a.value).second) {
        offer(graph.lemma(a), Provenance::Alias);
        queue.push_back(a);
      }
    }
  }

  for (auto v : klass) {
    ConceptId c{v};
    for (auto p : graph.parents(c)) {
      if (p != graph.root()) offer(graph.lemma(p), Provenance::Parent);
    }
    for (auto h : graph.children(c)) offer(graph.lemma(h), Provenance::Child);
    for (auto m : graph.components(c)) offer(graph.lemma(m), Provenance::Component);
  }

  ExpandedConceptSet out;
  out.seeds.assign(seed_keys.begin(), seed_keys.end());
  for (auto& [lemma, p] : found) out.members.push_back({lemma, p});
  return out;
}

}  // namespace lgm
