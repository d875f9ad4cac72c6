#include "lgm/eval.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "lgm/error.hpp"
#include "lgm/text.hpp"
#include "parallel.hpp"

namespace lgm {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::HotpotDistractor: return "hotpotqa_distractor";
    case DatasetFormat::MusiqueAns: return "musique_ans";
  }
  return "hotpotqa_distractor";
}

DatasetFormat parse_dataset_format(std::string_view name) {
  auto n = to_lower(name);
  if (n == "hotpotqa_distractor" || n == "hotpotqa" || n == "hotpot") return DatasetFormat::HotpotDistractor;
  if (n == "musique_ans" || n == "musique") return DatasetFormat::MusiqueAns;
  throw InvalidArgument("unknown dataset format: " + std::string(name));
}

std::string ContextDoc::text() const {
  // Hotpot sentences carry their own leading spaces; paragraphs do not.
  std::string out;
  for (const auto& p : paragraphs) {
    if (!out.empty() && !p.empty() && !std::isspace(static_cast<unsigned char>(p.front())) &&
        !std::isspace(static_cast<unsigned char>(out.back()))) {
      out.push_back(' ');
    }
    out += p;
  }
  return std::string(trim(out));
}

namespace {

std::string required_string(const json& rec, const char* field, const std::string& where) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_string()) {
    throw DatasetError(where + ": missing string field \"" + field + "\"");
  }
  return it->get<std::string>();
}

QAItem hotpot_item(const json& rec, const std::string& where) {
  if (!rec.is_object()) throw DatasetError(where + ": record is not an object");
  QAItem item;
  item.id = required_string(rec, "_id", where);
  item.question = required_string(rec, "question", where);
  item.gold_answer = required_string(rec, "answer", where);
  auto ctx = rec.find("context");
  if (ctx == rec.end() || !ctx->is_array()) throw DatasetError(where + ": missing \"context\" array");
  for (const auto& entry : *ctx) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_array()) {
      throw DatasetError(where + ": context entry is not [title, [sentences]]");
    }
    ContextDoc doc{entry[0].get<std::string>(), {}};
    for (const auto& s : entry[1]) {
      if (!s.is_string()) throw DatasetError(where + ": context sentence is not a string");
      doc.paragraphs.push_back(s.get<std::string>());
    }
    item.context_docs.push_back(std::move(doc));
  }
  return item;
}

QAItem musique_item(const json& rec, const std::string& where) {
  if (!rec.is_object()) throw DatasetError(where + ": record is not an object");
  QAItem item;
  item.id = required_string(rec, "id", where);
  item.question = required_string(rec, "question", where);
  item.gold_answer = required_string(rec, "answer", where);
  auto paras = rec.find("paragraphs");
  if (paras == rec.end() || !paras->is_array()) throw DatasetError(where + ": missing \"paragraphs\" array");
  for (const auto& p : *paras) {
    if (!p.is_object()) throw DatasetError(where + ": paragraph is not an object");
    item.context_docs.push_back(
        {required_string(p, "title", where), {required_string(p, "paragraph_text", where)}});
  }
  return item;
}

void check_item(const QAItem& item, const std::string& where) {
  if (trim(item.question).empty()) throw DatasetError(where + ": empty question");
  if (trim(item.gold_answer).empty()) throw DatasetError(where + ": empty answer");
}

}  // namespace

std::vector<QAItem> parse_dataset(std::string_view text, DatasetFormat format) {
  std::vector<QAItem> items;
  if (format == DatasetFormat::HotpotDistractor) {
    json doc;
    try {
      doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      throw DatasetError(std::string("hotpot dataset is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw DatasetError("hotpot dataset must be a JSON array of records");
    for (std::size_t i = 0; i < doc.size(); ++i) {
      auto where = "record " + std::to_string(i);
      if (doc[i].is_object() && doc[i].contains("_id") && doc[i]["_id"].is_string()) {
        where += " (" + doc[i]["_id"].get<std::string>() + ")";
      }
      items.push_back(hotpot_item(doc[i], where));
      check_item(items.back(), where);
    }
  } else {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto nl = text.find('\n', start);
      auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      ++line_no;
      start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      if (trim(line).empty()) continue;
      auto where = "line " + std::to_string(line_no);
      json rec;
      try {
        rec = json::parse(line.begin(), line.end());
      } catch (const json::parse_error& e) {
        throw DatasetError(where + ": not valid JSON: " + e.what());
      }
      items.push_back(musique_item(rec, where));
      check_item(items.back(), where);
    }
  }
  if (items.empty()) throw DatasetError("dataset has no records");
  return items;
}

std::vector<QAItem> load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("dataset not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset(buf.str(), format);
  } catch (const DatasetError& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "Yes";
    case Verdict::No: return "No";
    case Verdict::Unsupport: return "Unsupport";
  }
  return "Unsupport";
}

bool parse_judgment(std::string_view reply, Verdict& out) {
  std::string word;
  auto check = [&]() {
    auto w = to_lower(word);
    word.clear();
    if (w == "yes")
      out = Verdict::Yes;
    else if (w == "no")
      out = Verdict::No;
    else if (w == "unsupport" || w == "unsupported")
      out = Verdict::Unsupport;
    else
      return false;
    return true;
  };
  for (char c : reply) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(c);
    } else if (!word.empty() && check()) {
      return true;
    }
  }
  return !word.empty() && check();
}

Judgment judge(std::string_view question, std::string_view model_answer, std::string_view gold,
               ChatClient& llm, const ChatParams& params, const PromptCatalog* prompts) {
  if (trim(model_answer).empty()) return {Verdict::Unsupport, ""};
  const auto& catalog = prompts ? *prompts : PromptCatalog::builtin();
  auto messages = catalog.render("judge", {{"question", std::string(question)},
                                           {"llm_answer", std::string(model_answer)},
                                           {"standard_answer", std::string(gold)}});
  auto reply = llm.chat(messages, params);
  Verdict v;
  if (parse_judgment(reply, v)) return {v, reply};
  messages.push_back({Role::Assistant, reply});
  messages.push_back({Role::User, std::string(kReaskJudgeMessage)});
  auto second = llm.chat(messages, params);
  if (parse_judgment(second, v)) return {v, second};
  throw ResponseParseError("judge reply is not Yes, No or Unsupport", second);
}

EvalMetrics metrics(std::size_t n, std::size_t unsupported, std::size_t yes) {
  if (unsupported > n || yes > n - unsupported) throw InvalidArgument("metrics: counts do not fit N");
  EvalMetrics m;
  m.n = n;
  m.unsupported = unsupported;
  m.yes = yes;
  m.no = n - unsupported - yes;
  auto supported = static_cast<double>(n - unsupported);
  m.recall = n ? supported / static_cast<double>(n) : 0.0;
  m.precision = supported > 0 ? static_cast<double>(yes) / supported : 0.0;
  m.f1 = (m.recall > 0 && m.precision > 0) ? 2 * m.recall * m.precision / (m.recall + m.precision) : 0.0;
  return m;
}

EvalMetrics metrics(const std::vector<Verdict>& verdicts) {
  std::size_t u = 0, yes = 0;
  for (auto v : verdicts) {
    if (v == Verdict::Unsupport) ++u;
    if (v == Verdict::Yes) ++yes;
  }
  return metrics(verdicts.size(), u, yes);
}

RetrievalConfig default_retrieval_config(DatasetFormat format) {
  RetrievalConfig c;
  c.max_iterations = format == DatasetFormat::MusiqueAns ? 5 : 4;
  return c;
}

namespace {

void learn_context(const std::vector<ContextDoc>& docs, const std::string& prefix, Annotator& annotator,
                   LanguageGraph& graph, ChatClient& llm, const LearnConfig& config) {
  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto text = docs[d].text();
    if (text.empty()) continue;
    auto id = prefix + docs[d].title;
    learn_text(id, text, annotator, graph, llm, config);
    graph.metadata().sources.push_back(id);
  }
}

std::string safe_file_name(std::string_view id) {
  std::string out;
  for (char c : id)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out.empty() ? "item" : out;
}

}  // namespace

EvalReport run_eval(const std::vector<QAItem>& items, Annotator& annotator, ChatClient& llm,
                    ChatClient& judge_llm, const EvalConfig& config) {
  if (items.empty()) throw InvalidArgument("run_eval: dataset has no items");
  config.retrieval.validate();
  if (!config.trace_dir.empty()) std::filesystem::create_directories(config.trace_dir);

  std::unique_ptr<LanguageGraph> shared;
  if (config.shared_graph) {
    shared = std::make_unique<LanguageGraph>();
    // Context docs repeat across items; learn each title once.
    std::vector<ContextDoc> docs;
    for (const auto& item : items) {
      for (const auto& d : item.context_docs) {
        if (std::find(docs.begin(), docs.end(), d) == docs.end()) docs.push_back(d);
      }
    }
    learn_context(docs, "", annotator, *shared, llm, config.learn);
  }

  EvalReport report;
  report.records.resize(items.size());
  detail::parallel_for(items.size(), config.item_parallelism, [&](std::size_t i) {
    const auto& item = items[i];
    auto& rec = report.records[i];
    rec.id = item.id;
    rec.question = item.question;
    rec.gold_answer = item.gold_answer;
    std::vector<TraceEvent> trace;
    try {
      LanguageGraph local;
      const LanguageGraph* graph = shared.get();
      if (!graph) {
        learn_context(item.context_docs, item.id + "/", annotator, local, llm, config.learn);
        graph = &local;
      }
      auto result = run_query(item.question, *graph, llm, config.retrieval);
      rec.answer = result.answer;
      rec.iterations = result.iterations_used;
      rec.supports = result.supports.sentence_count();
      trace = std::move(result.trace);
    } catch (const RetrievalError& e) {
      rec.error = e.what();
      trace = e.trace();
    } catch (const Error& e) {
      rec.error = e.what();
    }
    if (rec.error.empty()) {
      try {
        auto j = judge(item.question, rec.answer, item.gold_answer, judge_llm, config.judge_chat,
                       config.retrieval.prompts);
        rec.verdict = j.verdict;
        rec.judge_raw = j.raw;
      } catch (const Error& e) {
        rec.verdict = Verdict::Unsupport;
        rec.error = std::string("judge failed: ") + e.what();
      }
    } else {
      rec.verdict = Verdict::Unsupport;
    }
    if (!config.trace_dir.empty()) {
      auto name = std::to_string(i) + "_" + safe_file_name(item.id) + ".jsonl";
      std::ofstream out(config.trace_dir / name, std::ios::binary | std::ios::trunc);
      out << trace_to_jsonl(trace);
      rec.trace_ref = name;
    }
  });

  std::vector<Verdict> verdicts;
  for (const auto& r : report.records) verdicts.push_back(r.verdict);
  report.metrics = metrics(verdicts);
  return report;
}

std::string report_to_jsonl(const EvalReport& report) {
  std::string out;
  for (const auto& r : report.records) {
    ordered_json rec;
    rec["id"] = r.id;
    rec["question"] = r.question;
    rec["gold_answer"] = r.gold_answer;
    rec["answer"] = r.answer;
    rec["verdict"] = to_string(r.verdict);
    rec["judge_raw"] = r.judge_raw;
    rec["iterations"] = r.iterations;
    rec["supports"] = r.supports;
    if (!r.trace_ref.empty()) rec["trace"] = r.trace_ref;
    if (!r.error.empty()) rec["error"] = r.error;
    out += rec.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
  }
  const auto& m = report.metrics;
  ordered_json summary{{"summary",
                        {{"n", m.n},
                         {"unsupported", m.unsupported},
                         {"yes", m.yes},
                         {"no", m.no},
                         {"recall", m.recall},
                         {"precision", m.precision},
                         {"f1", m.f1}}}};
  out += summary.dump() + "\n";
  return out;
}

std::string metrics_table(const EvalMetrics& m) {
  char buf[256];
  std::snprintf(
      buf, sizeof buf,
      "%-10s %8s\n%-10s %8zu\n%-10s %8zu\n%-10s %8zu\n%-10s %8zu\n%-10s %8.4f\n%-10s %8.4f\n%-10s %8.4f\n",
      "metric", "value", "N", m.n, "Unsupport", m.unsupported, "Yes", m.yes, "No", m.no, "Recall", m.recall,
      "Precision", m.precision, "F1", m.f1);
  return buf;
}

}  // namespace lgm
