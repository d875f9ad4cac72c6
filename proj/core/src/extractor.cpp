#include "lgm/extractor.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "lexicon.hpp"
#include "lgm/error.hpp"
#include "lgm/text.hpp"
#include "parallel.hpp"

namespace lgm {

using nlohmann::json;

std::string_view to_string(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::Pending: return "pending";
    case CandidateStatus::Valid: return "valid";
    case CandidateStatus::Invalid: return "invalid";
    case CandidateStatus::Unknown: return "unknown";
  }
  return "pending";
}

namespace {

const PromptCatalog& catalog_of(const ExtractOptions& o) {
  return o.prompts ? *o.prompts : PromptCatalog::builtin();
}

std::string_view prompt_id(RelationKind kind) {
  switch (kind) {
    case RelationKind::Inheritance: return "extract_inheritance";
    case RelationKind::Composition: return "extract_composition";
    case RelationKind::Alias: return "extract_alias";
  }
  return "extract_inheritance";
}

std::string string_field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end() || !it->is_string())
    throw ResponseParseError(std::string("missing string field \"") + name + "\"", obj.dump());
  return it->get<std::string>();
}

std::string collapse_ws(std::string_view s) {
  return join(split_whitespace(s), " ");
}

}  // namespace

std::string resolve_entity(std::string_view entity, std::string_view sentence) {
  auto in_entity = mark_antecedents(entity);
  std::string name;
  if (!in_entity.empty()) {
    name = in_entity.front();
  } else {
    name = std::string(trim(entity));
    auto lower = to_lower(name);
    if (lexicon::is_third_person_pronoun(lower)) {
      auto marks = mark_antecedents(sentence);
      // A pronoun with nothing to resolve it is not an entity.
      name = marks.empty() ? std::string() : marks.front();
    }
  }
  return canonical_concept(name);
}

std::vector<RelationCandidate> parse_extraction(RelationKind kind, std::string_view reply) {
  json doc;
  auto body = strip_code_fence(reply);
  try {
    doc = json::parse(body.begin(), body.end());
  } catch (const json::parse_error& e) {
    throw ResponseParseError(std::string("extraction reply is not JSON: ") + e.what(), std::string(reply));
  }
  if (doc.is_object()) {
    if (doc.empty()) return {};
    doc = json::array({doc});
  }
  if (!doc.is_array()) throw ResponseParseError("extraction reply is not a JSON array", std::string(reply));

  std::vector<RelationCandidate> out;
  try {
    for (const auto& item : doc) {
      if (!item.is_object()) throw ResponseParseError("extraction item is not an object", std::string(reply));
      if (item.empty()) continue;
      RelationCandidate c;
      c.kind = kind;
      c.sentence = item.contains("sentence") && item["sentence"].is_string()
                       ? item["sentence"].get<std::string>()
                       : "";
      switch (kind) {
        case RelationKind::Inheritance:
          c.subject = resolve_entity(string_field(item, "subclass"), c.sentence);
          c.objects.push_back(resolve_entity(string_field(item, "parent_class"), c.sentence));
          break;
        case RelationKind::Composition: {
          c.subject = resolve_entity(string_field(item, "entity"), c.sentence);
          auto it = item.find("components");
          if (it == item.end() || !it->is_array())
            throw ResponseParseError("missing \"components\" list", std::string(reply));
          for (const auto& comp : *it) {
            if (!comp.is_string()) throw ResponseParseError("component is not a string", std::string(reply));
            auto lemma = resolve_entity(comp.get<std::string>(), c.sentence);
            if (!lemma.empty() && std::find(c.objects.begin(), c.objects.end(), lemma) == c.objects.end()) {
              c.objects.push_back(std::move(lemma));
            }
          }
          break;
        }
        case RelationKind::Alias:
          c.subject = resolve_entity(string_field(item, "A"), c.sentence);
          c.objects.push_back(resolve_entity(string_field(item, "B"), c.sentence));
          break;
      }
      // An entity that lemmatizes to nothing ("the", "it" with no mark) is
      // not a usable relation; dropping it is not a format error.
      c.objects.erase(std::remove(c.objects.begin(), c.objects.end(), std::string{}), c.objects.end());
      std::erase(c.objects, std::string());
      if (c.subject.empty() || c.objects.empty()) continue;
      out.push_back(std::move(c));
    }
  } catch (const ResponseParseError&) {
    throw;
  } catch (const Error& e) {
    throw ResponseParseError(std::string("extraction item is unusable: ") + e.what(), std::string(reply));
  }
  return out;
}

std::vector<RelationCandidate> extract_relations(RelationKind kind,
                                                 const std::vector<AnnotatedSentence>& window,
                                                 ChatClient& llm, const ExtractOptions& options) {
  if (window.empty()) throw InvalidArgument("extract_relations: empty window");
  std::vector<std::string> surfaces;
  for (const auto& s : window) surfaces.push_back(s.surface);
  auto messages = catalog_of(options).render(prompt_id(kind), {{"text", join(surfaces, " ")}});
  auto reply = llm.chat(messages, options.chat);
  try {
    return parse_extraction(kind, reply);
  } catch (const ResponseParseError&) {
    messages.push_back({Role::Assistant, reply});
    messages.push_back({Role::User, std::string(kReaskMessage)});
    return parse_extraction(kind, llm.chat(messages, options.chat));
  }
}

const std::vector<std::string>& trigger_lemmas(RelationKind kind) {
  static const auto lemmatized = [](std::vector<std::string> words) {
    std::vector<std::string> out;
    for (const auto& w : words) {
      auto verb = lemmatize_word(w, Pos::Verb);
      out.push_back(verb);
      auto noun = lemmatize_word(w, Pos::Noun);
      if (noun != verb) out.push_back(noun);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  static const std::vector<std::string> inheritance =
      lemmatized({"be", "type", "kind", "subclass", "belong", "category", "parent"});
  static const std::vector<std::string> composition =
      lemmatized({"compose", "consist", "contain", "include", "mixture", "made"});
  static const std::vector<std::string> alias =
      lemmatized({"call", "know", "name", "stand", "refer", "same", "short"});
  switch (kind) {
    case RelationKind::Inheritance: return inheritance;
    case RelationKind::Composition: return composition;
    case RelationKind::Alias: return alias;
  }
  return inheritance;
}

ReflectionEvidence reflection_evidence(const RelationCandidate& candidate, const LanguageGraph& graph) {
  std::set<SentenceId> all;
  auto collect = [&](const std::string& lemma) {
    for (auto s : graph.sentences_matching(lemma)) all.insert(s);
  };
  collect(candidate.subject);
  for (const auto& o : candidate.objects) collect(o);

  const auto& triggers = trigger_lemmas(candidate.kind);
  auto subject_toks = lemma_tokens(candidate.subject);
  ReflectionEvidence ev;
  for (auto id : all) {
    auto toks = lemma_tokens(graph.sentence(id).sentence_lemma);
    bool states = false;
    if (lemma_matches(subject_toks, toks)) {
      bool has_object =
          std::any_of(candidate.objects.begin(), candidate.objects.end(),
                      [&](const std::string& o) { return lemma_matches(lemma_tokens(o), toks); });
      bool has_trigger = std::any_of(toks.begin(), toks.end(), [&](const std::string& t) {
        return std::binary_search(triggers.begin(), triggers.end(), t);
      });
      states = has_object && has_trigger;
    }
    (states ? ev.removed : ev.kept).push_back(id);
  }
  return ev;
}

bool parse_verdict(std::string_view reply, RelationStatus& out) {
  auto words = split_whitespace(to_lower(strip_code_fence(reply)));
  if (words.empty()) return false;
  auto w = words.front();
  while (!w.empty() && !std::isalpha(static_cast<unsigned char>(w.back()))) w.pop_back();
  while (!w.empty() && !std::isalpha(static_cast<unsigned char>(w.front()))) w.erase(w.begin());
  if (w == "valid")
    out = RelationStatus::Valid;
  else if (w == "invalid")
    out = RelationStatus::Invalid;
  else if (w == "unknown")
    out = RelationStatus::Unknown;
  else
    return false;
  return true;
}

ReflectionVerdict reflect(const RelationCandidate& candidate, const LanguageGraph& graph, ChatClient& llm,
                          const ExtractOptions& options) {
  if (candidate.status != CandidateStatus::Pending)
    throw InvalidArgument("reflect: candidate already judged");
  auto ev = reflection_evidence(candidate, graph);
  if (ev.kept.empty()) return {RelationStatus::Unknown, ""};

  std::string relation;
  switch (candidate.kind) {
    case RelationKind::Inheritance:
      relation = candidate.subject + " is a kind of " + candidate.objects.front();
      break;
    case RelationKind::Composition:
      relation = candidate.subject + " is composed of " + join(candidate.objects, ", ");
      break;
    case RelationKind::Alias:
      relation = candidate.subject + " is also called " + candidate.objects.front();
      break;
  }
  std::string evidence;
  for (auto id : ev.kept) evidence += "- " + graph.sentence(id).sentence + "\n";
  if (!evidence.empty()) evidence.pop_back();

  auto messages = catalog_of(options).render(
      "reflect",
      {{"kind", std::string(to_string(candidate.kind))}, {"relation", relation}, {"evidence", evidence}});
  auto reply = llm.chat(messages, options.chat);
  RelationStatus status;
  if (parse_verdict(reply, status)) return {status, reply};
  messages.push_back({Role::Assistant, reply});
  messages.push_back({Role::User, std::string(kReaskVerdictMessage)});
  auto second = llm.chat(messages, options.chat);
  if (parse_verdict(second, status)) return {status, second};
  throw ResponseParseError("reflection verdict is not valid/invalid/unknown", second);
}

LearnReport& LearnReport::operator+=(const LearnReport& o) {
  sentences += o.sentences;
  candidates += o.candidates;
  accepted += o.accepted;
  rejected += o.rejected;
  unknown += o.unknown;
  failures += o.failures;
  problems.insert(problems.end(), o.problems.begin(), o.problems.end());
  return *this;
}

LearnReport learn_document(const Document& doc, LanguageGraph& graph, ChatClient& llm,
                           const LearnConfig& config) {
  LearnReport report;
  if (doc.sentences.empty()) return report;
  if (config.window_size == 0) throw InvalidArgument("learn: window size must be positive");

  auto section = graph.add_section(doc.id);
  std::vector<SentenceId> ids;
  for (const auto& s : doc.sentences) ids.push_back(graph.add_sentence(section, s));
  report.sentences = ids.size();

  const RelationKind kinds[] = {RelationKind::Inheritance, RelationKind::Composition, RelationKind::Alias};
  std::size_t windows = (doc.sentences.size() + config.window_size - 1) / config.window_size;
  struct Job {
    std::vector<RelationCandidate> found;
    std::string parse_error;
  };
  std::vector<Job> jobs(windows * 3);
  detail::parallel_for(jobs.size(), config.parallelism, [&](std::size_t j) {
    auto w = j / 3;
    auto first = doc.sentences.begin() + static_cast<std::ptrdiff_t>(w * config.window_size);
    auto last = doc.sentences.begin() +
                static_cast<std::ptrdiff_t>(std::min(doc.sentences.size(), (w + 1) * config.window_size));
    std::vector<AnnotatedSentence> window(first, last);
    try {
      jobs[j].found = extract_relations(kinds[j % 3], window, llm, config.extract);
    } catch (const ResponseParseError& e) {
      jobs[j].parse_error = e.what();
    } catch (const LlmError& e) {
      throw LlmError(
          "learning '" + doc.id + "', sentences " + std::to_string(w * config.window_size) + "+: " + e.what(),
          e.digest());
    }
  });

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    auto w = j / 3;
    auto where = doc.id + " window " + std::to_string(w) + " (" + std::string(to_string(kinds[j % 3])) + ")";
    if (!jobs[j].parse_error.empty()) {
      report.candidates++;
      report.failures++;
      report.problems.push_back(where + ": " + jobs[j].parse_error);
      continue;
    }
    auto lo = w * config.window_size;
    auto hi = std::min(ids.size(), lo + config.window_size);
    for (auto& cand : jobs[j].found) {
      report.candidates++;
      // Evidence: window sentences that equal the cited sentence, falling
      // back to those mentioning both endpoints.
      std::vector<SentenceId> evidence;
      auto cited = collapse_ws(cand.sentence);
      for (auto i = lo; i < hi; ++i) {
        if (!cited.empty() &&
            (collapse_ws(doc.sentences[i].surface) == cited ||
             collapse_ws(strip_marks(doc.sentences[i].surface)) == collapse_ws(strip_marks(cited)))) {
          evidence.push_back(ids[i]);
        }
      }
      if (evidence.empty()) {
        for (auto i = lo; i < hi; ++i) {
          const auto& lf = doc.sentences[i].lemma_form;
          if (lemma_matches(cand.subject, lf) &&
              std::any_of(cand.objects.begin(), cand.objects.end(),
                          [&](const std::string& o) { return lemma_matches(o, lf); })) {
            evidence.push_back(ids[i]);
          }
        }
      }

      auto status = RelationStatus::Valid;
      if (config.reflect) {
        try {
          status = reflect(cand, graph, llm, config.extract).status;
        } catch (const ResponseParseError& e) {
          report.failures++;
          report.problems.push_back(where + ": " + e.what());
          continue;
        } catch (const LlmError& e) {
          throw LlmError("reflecting on '" + doc.id + "': " + e.what(), e.digest());
        }
      }
      if (status == RelationStatus::Invalid) {
        cand.status = CandidateStatus::Invalid;
        report.rejected++;
        continue;
      }

      bool stored_all = true;
      for (const auto& object : cand.objects) {
        try {
          graph.add_meta_relation(cand.kind, cand.subject, object, evidence, status);
        } catch (const GraphConstraintError& e) {
          stored_all = false;
          report.problems.push_back(where + ": " + e.what());
        }
      }
      if (!stored_all) {
        report.failures++;
      } else if (status == RelationStatus::Unknown) {
        cand.status = CandidateStatus::Unknown;
        report.unknown++;
      } else {
        cand.status = CandidateStatus::Valid;
        report.accepted++;
      }
    }
  }
  return report;
}

LearnReport learn_text(std::string_view doc_id, std::string_view raw, Annotator& annotator,
                       LanguageGraph& graph, ChatClient& llm, const LearnConfig& config) {
  if (trim(raw).empty()) return {};
  Document doc{std::string(doc_id), annotator.annotate(doc_id, raw)};
  return learn_document(doc, graph, llm, config);
}

}  // namespace lgm
