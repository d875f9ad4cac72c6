#include "lgm/retrieval.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "lgm/expansion.hpp"
#include "lgm/nlp.hpp"
#include "lgm/rouge.hpp"
#include "lgm/text.hpp"
#include "parallel.hpp"

namespace lgm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr auto kReplace = json::error_handler_t::replace;

std::size_t quoted_length(std::string_view s) {
  return utf8_length(json(std::string(s)).dump(-1, ' ', false, kReplace));
}

// Length of the two-space indented payload, maintained row by row.
//   {                      "{\n"               2
//     "k": [               q(k) + 6 per concept
//       "s",               4 + q(s) per sentence, ",\n" between
//     ],                   "\n  ]" = 4,  ",\n" between concepts
//   }                      "\n}"               2
class PayloadMeter {
 public:
  std::size_t length() const { return concepts_.empty() ? 2 : total_; }

  std::size_t length_with(const EvidenceRow& row) const {
    auto it = concepts_.find(row.concept_lemma);
    if (it == concepts_.end()) {
      auto entry = quoted_length(row.concept_lemma) + 10 + 4 + quoted_length(row.sentence);
      return concepts_.empty() ? 4 + entry : total_ + 2 + entry;
    }
    if (it->second.contains(row.sentence)) return length();
    return total_ + 2 + 4 + quoted_length(row.sentence);
  }

  void add(const EvidenceRow& row) {
    auto next = length_with(row);
    concepts_[row.concept_lemma].insert(row.sentence);
    total_ = next;
  }

 private:
  std::unordered_map<std::string, std::unordered_set<std::string>> concepts_;
  std::size_t total_ = 0;
};

const PromptCatalog& catalog_of(const RetrievalConfig& c) {
  return c.prompts ? *c.prompts : PromptCatalog::builtin();
}

// Values may be a list of sentences or a lone sentence.
std::vector<std::string> sentence_list(const json& v, std::string_view raw) {
  std::vector<std::string> out;
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& s : v) {
      if (!s.is_string()) throw ResponseParseError("cited sentence is not a string", std::string(raw));
      out.push_back(s.get<std::string>());
    }
  } else {
    throw ResponseParseError("citation list is neither a string nor an array", std::string(raw));
  }
  return out;
}

json parse_object(std::string_view reply) {
  auto body = strip_code_fence(reply);
  json doc;
  try {
    doc = json::parse(body.begin(), body.end());
  } catch (const json::parse_error& e) {
    throw ResponseParseError(std::string("reply is not JSON: ") + e.what(), std::string(reply));
  }
  if (!doc.is_object()) throw ResponseParseError("reply is not a JSON object", std::string(reply));
  return doc;
}

std::vector<std::pair<std::string, std::vector<std::string>>> parse_citations(std::string_view reply) {
  auto doc = parse_object(reply);
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (auto it = doc.begin(); it != doc.end(); ++it)
    out.emplace_back(it.key(), sentence_list(it.value(), reply));
  // json::object is key-sorted; keep that order, it is deterministic.
  return out;
}

// Maps a model citation (key, sentence) onto a pair present in `pool`.
// Returns the concept to file it under, or empty when it is not verbatim.
std::string place_citation(const SupportSet& pool, std::string_view key, std::string_view sentence) {
  auto norm = normalize_lemma(key);
  if (pool.contains(norm, sentence)) return norm;
  for (const auto& [concept_lemma, sentences] : pool.entries()) {
    if (std::find(sentences.begin(), sentences.end(), sentence) != sentences.end()) return concept_lemma;
  }
  return {};
}

std::string cut(std::string_view s, std::size_t n = 120) {
  return s.size() <= n ? std::string(s) : std::string(s.substr(0, n)) + "...";
}

}  // namespace

void RetrievalConfig::validate() const {
  if (chunk_size < 1000) throw InvalidArgument("chunk size K must be at least 1000 characters");
  if (max_iterations < 1) throw InvalidArgument("max iterations must be at least 1");
  if (max_compressions < 0) throw InvalidArgument("max compression steps must not be negative");
  if (parallelism < 1) throw InvalidArgument("parallelism must be at least 1");
}

SupportSet::SupportSet(const std::vector<EvidenceRow>& rows) {
  for (const auto& r : rows) add(r.concept_lemma, r.sentence);
}

bool SupportSet::add(std::string_view concept_lemma, std::string_view sentence) {
  auto it =
      std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == concept_lemma; });
  if (it == entries_.end()) {
    entries_.emplace_back(std::string(concept_lemma), std::vector<std::string>{std::string(sentence)});
    return true;
  }
  if (std::find(it->second.begin(), it->second.end(), sentence) != it->second.end()) return false;
  it->second.emplace_back(sentence);
  return true;
}

void SupportSet::merge(const SupportSet& other) {
  for (const auto& [c, sentences] : other.entries_) {
    for (const auto& s : sentences) add(c, s);
  }
}

bool SupportSet::contains(std::string_view concept_lemma, std::string_view sentence) const {
  for (const auto& [c, sentences] : entries_) {
    if (c == concept_lemma) return std::find(sentences.begin(), sentences.end(), sentence) != sentences.end();
  }
  return false;
}

bool SupportSet::contains_sentence(std::string_view sentence) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) {
    return std::find(e.second.begin(), e.second.end(), sentence) != e.second.end();
  });
}

std::size_t SupportSet::sentence_count() const {
  return std::accumulate(entries_.begin(), entries_.end(), std::size_t{0},
                         [](std::size_t n, const auto& e) { return n + e.second.size(); });
}

std::vector<EvidenceRow> SupportSet::rows() const {
  std::vector<EvidenceRow> out;
  for (const auto& [c, sentences] : entries_) {
    for (const auto& s : sentences) out.push_back({c, s});
  }
  return out;
}

std::string SupportSet::to_json() const {
  ordered_json doc = ordered_json::object();
  for (const auto& [c, sentences] : entries_) doc[c] = sentences;
  return doc.dump(2, ' ', false, kReplace);
}

std::size_t SupportSet::length() const {
  return utf8_length(to_json());
}

std::size_t payload_length(const std::vector<EvidenceRow>& rows) {
  PayloadMeter meter;
  for (const auto& r : rows) meter.add(r);
  return meter.length();
}

std::vector<Chunk> chunk_rows(const std::vector<EvidenceRow>& rows, std::size_t k) {
  std::vector<Chunk> out;
  PayloadMeter meter;
  Chunk current;
  auto flush = [&] {
    if (current.rows.empty()) return;
    current.length = meter.length();
    current.oversize = current.length > k;
    out.push_back(std::move(current));
    current = Chunk{};
    meter = PayloadMeter{};
  };
  for (const auto& row : rows) {
    if (!current.rows.empty() && meter.length_with(row) > k) flush();
    meter.add(row);
    current.rows.push_back(row);
  }
  flush();
  return out;
}

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& e : trace) {
    ordered_json rec;
    rec["step"] = e.step;
    rec["iteration"] = e.iteration;
    if (e.compression >= 0) rec["compression"] = e.compression;
    if (!e.call_id.empty()) rec["call_id"] = e.call_id;
    if (!e.digest.empty()) rec["digest"] = e.digest;
    rec["count"] = e.count;
    if (e.size_before || e.size_after) {
      rec["size_before"] = e.size_before;
      rec["size_after"] = e.size_after;
    }
    if (!e.lemmas.empty()) rec["lemmas"] = e.lemmas;
    if (!e.message.empty()) rec["message"] = e.message;
    out += rec.dump(-1, ' ', false, kReplace);
    out.push_back('\n');
  }
  return out;
}

std::string final_answer_to_json(const FinalAnswer& a, bool with_trace) {
  ordered_json doc;
  doc["answer"] = a.answer;
  doc["unsupported_concepts"] = a.unsupported_concepts;
  ordered_json supports = ordered_json::object();
  for (const auto& [c, sentences] : a.supports.entries()) supports[c] = sentences;
  doc["supports"] = supports;
  doc["iterations_used"] = a.iterations_used;
  if (with_trace) {
    auto lines = trace_to_jsonl(a.trace);
    ordered_json events = ordered_json::array();
    std::size_t start = 0;
    for (auto nl = lines.find('\n'); nl != std::string::npos; nl = lines.find('\n', start)) {
      events.push_back(ordered_json::parse(lines.substr(start, nl - start)));
      start = nl + 1;
    }
    doc["trace"] = events;
  }
  return doc.dump(2, ' ', false, kReplace);
}

std::string_view model_knowledge_clause(bool allowed) {
  if (allowed) {
    return "You may use your own knowledge to fill small gaps, but if the gap cannot be filled reliably,";
  }
  return "Do not use your own knowledge to fill the gap;";
}

SupportSet mark_supporting(const Chunk& chunk, std::string_view question, const SupportSet& already,
                           ChatClient& llm, const RetrievalConfig& config, std::string_view call_id,
                           std::vector<TraceEvent>& events, int iteration) {
  SupportSet pool(chunk.rows);
  auto messages = catalog_of(config).render("parallel_summary", {{"already", already.to_json()},
                                                                 {"descriptions", pool.to_json()},
                                                                 {"question", std::string(question)},
                                                                 {"note_text", ""}});
  TraceEvent ev{.step = "mark",
                .iteration = iteration,
                .call_id = std::string(call_id),
                .digest = transcript_digest(messages),
                .count = chunk.rows.size()};
  auto reply = llm.chat(messages, config.chat);

  std::vector<std::pair<std::string, std::vector<std::string>>> cited;
  try {
    cited = parse_citations(reply);
  } catch (const ResponseParseError&) {
    messages.push_back({Role::Assistant, reply});
    messages.push_back({Role::User, std::string(kReaskObjectMessage)});
    auto retry_id = std::string(call_id) + ".retry";
    events.push_back(TraceEvent{
        .step = "reask", .iteration = iteration, .call_id = retry_id, .digest = transcript_digest(messages)});
    auto second = llm.chat(messages, config.chat);
    try {
      cited = parse_citations(second);
    } catch (const ResponseParseError& e) {
      events.push_back(ev);
      events.push_back(TraceEvent{.step = "error",
                                  .iteration = iteration,
                                  .call_id = std::string(call_id),
                                  .message = std::string("chunk skipped: ") + e.what()});
      return {};
    }
  }

  SupportSet out;
  for (const auto& [key, sentences] : cited) {
    for (const auto& s : sentences) {
      auto concept_lemma = place_citation(pool, key, s);
      if (concept_lemma.empty()) {
        events.push_back(TraceEvent{.step = "warning",
                                    .iteration = iteration,
                                    .call_id = std::string(call_id),
                                    .message = "dropped non-verbatim citation: " + cut(s)});
        continue;
      }
      out.add(concept_lemma, s);
    }
  }
  ev.size_after = out.length();
  events.push_back(ev);
  return out;
}

namespace {

// Marks every chunk concurrently and merges in chunk order.
SupportSet mark_all(const std::vector<Chunk>& chunks, std::string_view question, const SupportSet& already,
                    ChatClient& llm, const RetrievalConfig& config, const std::string& id_prefix,
                    std::vector<TraceEvent>& events, int iteration) {
  std::vector<SupportSet> found(chunks.size());
  std::vector<std::vector<TraceEvent>> logs(chunks.size());
  detail::parallel_for(chunks.size(), config.parallelism, [&](std::size_t k) {
    found[k] = mark_supporting(chunks[k], question, already, llm, config,
                               id_prefix + ".c" + std::to_string(k), logs[k], iteration);
  });
  SupportSet merged;
  for (std::size_t k = 0; k < chunks.size(); ++k) {
    merged.merge(found[k]);
    events.insert(events.end(), logs[k].begin(), logs[k].end());
  }
  return merged;
}

}  // namespace

SupportSet compress(const SupportSet& s, std::string_view question, ChatClient& llm,
                    const RetrievalConfig& config, std::vector<TraceEvent>& events, int iteration, int step) {
  auto before = s.length();
  if (before <= config.chunk_size) return s;
  auto chunks = chunk_rows(s.rows(), config.chunk_size);
  auto prefix = "i" + std::to_string(iteration) + ".compress" + std::to_string(step);
  auto out = mark_all(chunks, question, SupportSet{}, llm, config, prefix, events, iteration);
  events.push_back(TraceEvent{.step = "compress",
                              .iteration = iteration,
                              .compression = step,
                              .count = chunks.size(),
                              .size_before = before,
                              .size_after = out.length()});
  return out;
}

SupportSet prune_by_rouge(const SupportSet& s, std::string_view question, std::size_t k) {
  if (s.length() <= k) return s;
  auto rows = s.rows();
  auto q = rouge_tokens(question);
  std::vector<double> score(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) score[i] = rouge_l(rouge_tokens(rows[i].sentence), q);
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  std::vector<bool> keep(rows.size(), false);
  PayloadMeter meter;
  for (std::size_t n = 0; n < order.size(); ++n) {
    const auto& row = rows[order[n]];
    if (n > 0 && meter.length_with(row) > k) break;
    meter.add(row);
    keep[order[n]] = true;
  }
  SupportSet out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (keep[i]) out.add(rows[i].concept_lemma, rows[i].sentence);
  }
  return out;
}

AnswerResult parse_answer(std::string_view reply) {
  auto doc = parse_object(reply);
  AnswerResult out;
  auto a = doc.find("answer");
  if (a == doc.end() || !a->is_string())
    throw ResponseParseError("reply has no string \"answer\"", std::string(reply));
  out.answer = a->get<std::string>();
  if (auto u = doc.find("unsupported_concepts"); u != doc.end() && !u->is_null()) {
    for (const auto& phrase : sentence_list(*u, reply)) {
      if (!trim(phrase).empty()) out.unsupported_concepts.push_back(phrase);
    }
  }
  if (auto s = doc.find("supports"); s != doc.end() && !s->is_null()) {
    if (!s->is_object()) throw ResponseParseError("\"supports\" is not an object", std::string(reply));
    for (auto it = s->begin(); it != s->end(); ++it) {
      for (const auto& sentence : sentence_list(it.value(), reply)) out.supports.add(it.key(), sentence);
    }
  }
  if (out.unsupported_concepts.empty() && trim(out.answer).empty()) {
    throw ResponseParseError("reply has neither an answer nor unsupported concepts", std::string(reply));
  }
  return out;
}

AnswerResult answer(std::string_view question, const SupportSet& s, ChatClient& llm,
                    const RetrievalConfig& config, std::vector<TraceEvent>& events, int iteration) {
  auto messages = catalog_of(config).render(
      "merge_response",
      {{"LLM_knowledge_support", std::string(model_knowledge_clause(config.allow_model_knowledge))},
       {"descriptions", s.to_json()},
       {"question", std::string(question)},
       {"note_text", ""}});
  auto call_id = "i" + std::to_string(iteration) + ".answer";
  TraceEvent ev{.step = "answer",
                .iteration = iteration,
                .call_id = call_id,
                .digest = transcript_digest(messages),
                .count = s.sentence_count(),
                .size_before = s.length()};
  auto reply = llm.chat(messages, config.chat);
  AnswerResult raw;
  try {
    raw = parse_answer(reply);
  } catch (const ResponseParseError&) {
    messages.push_back({Role::Assistant, reply});
    messages.push_back({Role::User, std::string(kReaskObjectMessage)});
    events.push_back(TraceEvent{.step = "reask",
                                .iteration = iteration,
                                .call_id = call_id + ".retry",
                                .digest = transcript_digest(messages)});
    auto second = llm.chat(messages, config.chat);
    try {
      raw = parse_answer(second);
    } catch (const ResponseParseError& e) {
      events.push_back(ev);
      events.push_back(
          TraceEvent{.step = "error", .iteration = iteration, .call_id = call_id, .message = e.what()});
      throw RetrievalError(std::string("answer step failed: ") + e.what(), events);
    }
  }

  // Supports are only kept when they are sentences we actually sent.
  AnswerResult out{raw.answer, raw.unsupported_concepts, {}};
  for (const auto& [key, sentences] : raw.supports.entries()) {
    for (const auto& sentence : sentences) {
      auto concept_lemma = place_citation(s, key, sentence);
      if (concept_lemma.empty()) {
        events.push_back(TraceEvent{.step = "warning",
                                    .iteration = iteration,
                                    .call_id = call_id,
                                    .message = "dropped non-verbatim support: " + cut(sentence)});
        continue;
      }
      out.supports.add(concept_lemma, sentence);
    }
  }
  ev.lemmas = out.unsupported_concepts;
  events.push_back(ev);
  return out;
}

std::vector<std::string> concepts_from_missing(const std::vector<std::string>& phrases) {
  std::vector<std::string> out;
  auto push = [&](std::string lemma) {
    if (!lemma.empty() && std::find(out.begin(), out.end(), lemma) == out.end())
      out.push_back(std::move(lemma));
  };
  for (const auto& phrase : phrases) {
    auto nouns = extract_noun_lemmas(phrase);
    if (nouns.empty()) {
      push(canonical_concept(phrase));
    } else {
      for (auto& n : nouns) push(std::move(n));
    }
  }
  return out;
}

FinalAnswer run_query(std::string_view question, const LanguageGraph& graph, ChatClient& llm,
                      const RetrievalConfig& config) {
  config.validate();
  FinalAnswer result;
  auto& events = result.trace;
  try {
    SupportSet s;
    auto concepts = extract_noun_lemmas(question);
    events.push_back(
        TraceEvent{.step = "extract", .iteration = 0, .count = concepts.size(), .lemmas = concepts});

    AnswerResult last;
    for (int i = 0; i < config.max_iterations; ++i) {
      auto expanded = expand(concepts, graph);
      auto lemmas = expanded.lemmas();
      events.push_back(
          TraceEvent{.step = "expand", .iteration = i, .count = lemmas.size(), .lemmas = lemmas});

      std::vector<EvidenceRow> rows;
      for (auto& r : graph.sentences_for_concepts(lemmas)) rows.push_back({r.concept_lemma, r.sentence});
      auto chunks = chunk_rows(rows, config.chunk_size);
      events.push_back(TraceEvent{.step = "retrieve", .iteration = i, .count = rows.size()});
      events.push_back(TraceEvent{.step = "chunk", .iteration = i, .count = chunks.size()});

      auto before = s.length();
      s.merge(mark_all(chunks, question, s, llm, config, "i" + std::to_string(i) + ".mark", events, i));
      events.push_back(TraceEvent{.step = "merge",
                                  .iteration = i,
                                  .count = s.sentence_count(),
                                  .size_before = before,
                                  .size_after = s.length()});

      int j = 0;
      while (s.length() > config.chunk_size) {
        if (j >= config.max_compressions) {
          auto size = s.length();
          s = prune_by_rouge(s, question, config.chunk_size);
          events.push_back(TraceEvent{.step = "prune",
                                      .iteration = i,
                                      .compression = j,
                                      .count = s.sentence_count(),
                                      .size_before = size,
                                      .size_after = s.length()});
          break;
        }
        s = compress(s, question, llm, config, events, i, j);
        ++j;
      }

      last = answer(question, s, llm, config, events, i);
      result.iterations_used = i + 1;
      if (last.unsupported_concepts.empty()) break;
      concepts = concepts_from_missing(last.unsupported_concepts);
      events.push_back(
          TraceEvent{.step = "missing", .iteration = i, .count = concepts.size(), .lemmas = concepts});
    }

    result.answer = last.answer;
    result.unsupported_concepts = last.unsupported_concepts;
    result.supports = last.supports;
    events.push_back(TraceEvent{
        .step = "done", .iteration = result.iterations_used - 1, .count = result.supports.sentence_count()});
    return result;
  } catch (const RetrievalError& e) {
    throw RetrievalError(e.what(), events);
  } catch (const Error& e) {
    events.push_back(TraceEvent{.step = "error", .iteration = result.iterations_used, .message = e.what()});
    throw RetrievalError(std::string("retrieval aborted: ") + e.what(), events);
  }
}

}  // namespace lgm
