#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "lgm/annotator_process.hpp"
#include "lgm/error.hpp"
#include "lgm/eval.hpp"
#include "lgm/extractor.hpp"
#include "lgm/graph_io.hpp"
#include "lgm/http_llm.hpp"
#include "lgm/nlp.hpp"
#include "lgm/prompts.hpp"
#include "lgm/retrieval.hpp"
#include "lgm/scripted_llm.hpp"

namespace fs = std::filesystem;

namespace lgm::cli {
namespace {

struct LlmOptions {
  std::string backend = "scripted";
  std::string script;
  std::string record;
  std::string base_url;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
  int timeout_s = 120;
  int retries = 3;
};

struct RetrievalOptions {
  std::size_t chunk_size = 30000;
  int max_iters = 4;
  int max_compressions = 3;
  std::size_t parallelism = 4;
  bool no_model_knowledge = false;
};

struct Options {
  LlmOptions llm;
  std::string prompts_dir;

  // learn
  std::vector<std::string> corpus;
  std::string graph;
  bool append = false;
  bool reflect = false;
  std::size_t window = 12;
  std::size_t learn_parallelism = 4;
  std::string annotator = "builtin";
  std::string annotator_cmd;
  int annotator_timeout_s = 60;

  // query
  RetrievalOptions rt;
  std::string question;
  bool trace = false;
  std::string trace_out;
  bool json = false;

  // eval
  std::string dataset;
  std::string format;
  std::string report;
  std::string trace_dir;
  bool shared_graph = false;
  std::size_t item_parallelism = 1;
  std::size_t limit = 0;

  // export
  std::string out;
};

void add_llm_options(CLI::App* cmd, LlmOptions& o) {
  cmd->add_option("--llm", o.backend, "Model backend")
      ->check(CLI::IsMember({"scripted", "http"}))
      ->capture_default_str();
  cmd->add_option("--script", o.script, "Script file for the scripted backend")->check(CLI::ExistingFile);
  cmd->add_option("--record", o.record, "Save every exchange as a replayable script");
  cmd->add_option("--base-url", o.base_url, "Chat-completions base URL (default: $LGM_BASE_URL)");
  cmd->add_option("--model", o.model, "Model name (default: $LGM_MODEL or gpt-4o-mini)");
  cmd->add_option("--temperature", o.temperature, "Sampling temperature")
      ->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  cmd->add_option("--max-tokens", o.max_tokens, "Completion token limit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--timeout", o.timeout_s, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--retries", o.retries, "Retries on transport errors, 429 and 5xx")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void add_retrieval_options(CLI::App* cmd, RetrievalOptions& o, CLI::Option** max_iters = nullptr) {
  cmd->add_option("-K,--chunk-size", o.chunk_size, "Character budget per model payload (K)")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{10'000'000}))
      ->capture_default_str();
  auto* mi = cmd->add_option("-I,--max-iters", o.max_iters, "Outer iteration limit (I_max)")
                 ->check(CLI::Range(1, 100))
                 ->capture_default_str();
  if (max_iters) *max_iters = mi;
  cmd->add_option("-J,--max-compressions", o.max_compressions, "Compression limit per iteration (J_max)")
      ->check(CLI::Range(0, 100))
      ->capture_default_str();
  cmd->add_option("--parallelism", o.parallelism, "Concurrent model calls while marking")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
      ->capture_default_str();
  cmd->add_flag("--no-model-knowledge", o.no_model_knowledge,
                "Forbid the model from filling gaps with its own knowledge");
}

void add_annotator_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--annotator", o.annotator,
                  "builtin, process (run --annotator-cmd) or preannotated (corpus files are JSON)")
      ->check(CLI::IsMember({"builtin", "process", "preannotated"}))
      ->capture_default_str();
  cmd->add_option("--annotator-cmd", o.annotator_cmd, "Command line of the external annotator");
  cmd->add_option("--annotator-timeout", o.annotator_timeout_s, "Seconds to wait for the annotator")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ChatParams chat_params(const LlmOptions& o) {
  ChatParams p;
  p.temperature = o.temperature;
  p.max_tokens = o.max_tokens;
  p.timeout = std::chrono::seconds(o.timeout_s);
  p.retries = o.retries;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NotFound("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out.flush()) throw Error("cannot write " + p.string());
}

/// Owns the backend and, when recording, the recorder wrapped around it.
class Backend {
 public:
  explicit Backend(const LlmOptions& o) : record_(o.record) {
    std::shared_ptr<ChatClient> base;
    if (o.backend == "scripted") {
      if (o.script.empty()) throw UsageError("--llm scripted requires --script");
      auto entries = ScriptedChatClient::parse_script(read_file(o.script));
      base = std::make_shared<ScriptedChatClient>(std::move(entries));
    } else {
      auto cfg = HttpChatClient::config_from_env();
      if (!o.base_url.empty()) cfg.base_url = o.base_url;
      if (!o.model.empty()) cfg.model = o.model;
      if (cfg.base_url.empty()) throw UsageError("--llm http requires --base-url or LGM_BASE_URL");
      base = std::make_shared<HttpChatClient>(std::move(cfg));
    }
    if (!record_.empty()) {
      recorder_ = std::make_shared<RecordingChatClient>(base);
      client_ = recorder_;
    } else {
      client_ = base;
    }
  }
  ~Backend() {
    // Save even when the command failed part way; partial sessions replay too.
    if (recorder_) {
      try {
        recorder_->save_script(record_);
      } catch (...) {
      }
    }
  }
  ChatClient& client() { return *client_; }

 private:
  std::string record_;
  std::shared_ptr<ChatClient> client_;
  std::shared_ptr<RecordingChatClient> recorder_;
};

std::vector<std::string> split_command(std::string_view cmd) {
  std::vector<std::string> argv;
  std::string cur;
  char quote = 0;
  bool have = false;
  for (char c : cmd) {
    if (quote) {
      if (c == quote)
        quote = 0;
      else
        cur.push_back(c);
    } else if (c == '\'' || c == '"') {
      quote = c;
      have = true;
    } else if (c == ' ' || c == '\t') {
      if (have || !cur.empty()) argv.push_back(std::move(cur));
      cur.clear();
      have = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quote) throw UsageError("unbalanced quote in --annotator-cmd");
  if (have || !cur.empty()) argv.push_back(std::move(cur));
  return argv;
}

std::unique_ptr<Annotator> make_annotator(const Options& o) {
  if (o.annotator == "process") {
    if (o.annotator_cmd.empty()) throw UsageError("--annotator process requires --annotator-cmd");
    auto argv = split_command(o.annotator_cmd);
    if (argv.empty()) throw UsageError("--annotator-cmd is empty");
    return std::make_unique<ProcessAnnotator>(std::move(argv), std::chrono::seconds(o.annotator_timeout_s));
  }
  return std::make_unique<BuiltinAnnotator>();
}

std::vector<fs::path> corpus_files(const std::vector<std::string>& inputs, bool preannotated) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (!e.is_regular_file()) continue;
        auto ext = e.path().extension().string();
        bool ok = preannotated ? ext == ".json" : (ext == ".txt" || ext == ".md");
        if (ok) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) throw UsageError("corpus contains no documents");
  return files;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RetrievalConfig retrieval_config(const RetrievalOptions& r, const LlmOptions& l,
                                 const PromptCatalog* prompts) {
  RetrievalConfig c;
  c.chunk_size = r.chunk_size;
  c.max_iterations = r.max_iters;
  c.max_compressions = r.max_compressions;
  c.parallelism = r.parallelism;
  c.allow_model_knowledge = !r.no_model_knowledge;
  c.chat = chat_params(l);
  c.prompts = prompts;
  return c;
}

void print_report(std::ostream& out, const LearnReport& r) {
  out << "sentences=" << r.sentences << " candidates=" << r.candidates << " accepted=" << r.accepted
      << " rejected=" << r.rejected << " unknown=" << r.unknown << " failures=" << r.failures << "\n";
}

int cmd_learn(const Options& o, const PromptCatalog* prompts, std::ostream& out, std::ostream& err) {
  bool pre = o.annotator == "preannotated";
  auto files = corpus_files(o.corpus, pre);
  auto annotator = pre ? nullptr : make_annotator(o);
  Backend backend(o.llm);

  LanguageGraph graph;
  if (o.append && fs::exists(o.graph)) graph = load_graph(o.graph);
  if (graph.metadata().created.empty()) graph.metadata().created = utc_now();

  LearnConfig cfg;
  cfg.reflect = o.reflect;
  cfg.window_size = o.window;
  cfg.parallelism = o.learn_parallelism;
  cfg.extract.prompts = prompts;
  cfg.extract.chat = chat_params(o.llm);

  LearnReport total;
  for (const auto& f : files) {
    auto id = f.stem().string();
    LearnReport r;
    if (pre) {
      r = learn_document({id, load_preannotated(f)}, graph, backend.client(), cfg);
    } else {
      auto text = read_file(f);
      r = learn_text(id, text, *annotator, graph, backend.client(), cfg);
    }
    graph.metadata().sources.push_back(f.string());
    for (const auto& p : r.problems) err << "warning: " << id << ": " << p << "\n";
    total += r;
  }
  save_graph(graph, o.graph);
  print_report(out, total);
  out << "graph: " << o.graph << " (" << graph.concepts().size() << " concepts, " << graph.meta_edges().size()
      << " relations, " << graph.sentences().size() << " sentences)\n";
  return kExitOk;
}

void print_answer(std::ostream& out, const FinalAnswer& a) {
  out << "answer: " << a.answer << "\n";
  out << "iterations: " << a.iterations_used << "\n";
  out << "supports:\n";
  for (const auto& row : a.supports.rows()) out << "  [" << row.concept_lemma << "] " << row.sentence << "\n";
  if (!a.unsupported_concepts.empty()) {
    out << "unsupported:";
    for (const auto& c : a.unsupported_concepts) out << " " << c;
    out << "\n";
  }
}

int cmd_query(const Options& o, const PromptCatalog* prompts, std::ostream& out, std::ostream& err) {
  auto graph = load_graph(o.graph);
  Backend backend(o.llm);
  auto cfg = retrieval_config(o.rt, o.llm, prompts);
  try {
    auto answer = run_query(o.question, graph, backend.client(), cfg);
    if (o.json) {
      out << final_answer_to_json(answer, o.trace) << "\n";
    } else {
      print_answer(out, answer);
      if (o.trace) out << "trace:\n" << trace_to_jsonl(answer.trace);
    }
    if (!o.trace_out.empty()) write_file(o.trace_out, trace_to_jsonl(answer.trace));
  } catch (const RetrievalError& e) {
    if (o.trace) err << trace_to_jsonl(e.trace());
    if (!o.trace_out.empty()) write_file(o.trace_out, trace_to_jsonl(e.trace()));
    throw;
  }
  return kExitOk;
}

int cmd_eval(const Options& o, const PromptCatalog* prompts, CLI::Option* max_iters, std::ostream& out,
             std::ostream&) {
  auto format = parse_dataset_format(o.format);
  auto items = load_dataset(o.dataset, format);
  if (o.limit && items.size() > o.limit) items.resize(o.limit);
  auto annotator = make_annotator(o);
  Backend backend(o.llm);

  EvalConfig cfg;
  cfg.retrieval = retrieval_config(o.rt, o.llm, prompts);
  if (max_iters->count() == 0) cfg.retrieval.max_iterations = default_retrieval_config(format).max_iterations;
  cfg.learn.reflect = o.reflect;
  cfg.learn.window_size = o.window;
  cfg.learn.parallelism = o.learn_parallelism;
  cfg.learn.extract.prompts = prompts;
  cfg.learn.extract.chat = chat_params(o.llm);
  cfg.judge_chat = chat_params(o.llm);
  cfg.shared_graph = o.shared_graph;
  cfg.item_parallelism = o.item_parallelism;
  if (!o.trace_dir.empty()) cfg.trace_dir = o.trace_dir;

  auto report = run_eval(items, *annotator, backend.client(), backend.client(), cfg);
  write_file(o.report, report_to_jsonl(report));
  const auto& m = report.metrics;
  char line[160];
  std::snprintf(line, sizeof line, "N=%zu U=%zu yes=%zu no=%zu recall=%.4f precision=%.4f f1=%.4f\n", m.n,
                m.unsupported, m.yes, m.no, m.recall, m.precision, m.f1);
  out << line;
  out << "I_max=" << cfg.retrieval.max_iterations << " report: " << o.report << "\n";
  return kExitOk;
}

int cmd_export(const Options& o, std::ostream& out) {
  auto graph = load_graph(o.graph);
  auto text = export_cypher(graph);
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, text);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Language-graph question answering: learn a concept graph, query it, evaluate, export."};
  app.name("lgm");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values; flags given on the command line win");
  app.add_option("--prompts", o.prompts_dir, "Directory of prompt overrides (<id>.json)")
      ->check(CLI::ExistingDirectory);

  auto* learn = app.add_subcommand("learn", "Build or extend a graph from documents");
  learn->add_option("--corpus", o.corpus, "Document files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  learn->add_option("--graph", o.graph, "Graph file to write")->required();
  learn->add_flag("--append", o.append, "Extend the graph file if it exists");
  learn->add_flag("--reflect", o.reflect, "Validate each relation against independent evidence");
  learn->add_option("--window", o.window, "Sentences per extraction window")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}))
      ->capture_default_str();
  learn->add_option("--parallelism", o.learn_parallelism, "Concurrent extraction calls")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
      ->capture_default_str();
  add_annotator_options(learn, o);
  add_llm_options(learn, o.llm);

  auto* query = app.add_subcommand("query", "Answer a question over a graph");
  query->add_option("--graph", o.graph, "Graph file")->required()->check(CLI::ExistingFile);
  query->add_option("question", o.question, "Question text")->required();
  query->add_flag("--trace", o.trace, "Print the full retrieval trace");
  query->add_option("--trace-out", o.trace_out, "Write the trace as JSON lines");
  query->add_flag("--json", o.json, "Print the answer as JSON");
  add_retrieval_options(query, o.rt);
  add_llm_options(query, o.llm);

  auto* eval = app.add_subcommand("eval", "Run a benchmark dataset through learn, query and judge");
  eval->add_option("--dataset", o.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  eval->add_option("--format", o.format, "Dataset schema")
      ->required()
      ->check(CLI::IsMember({"hotpotqa_distractor", "musique_ans"}));
  eval->add_option("--report", o.report, "Per-item JSON lines report")->required();
  eval->add_option("--trace-dir", o.trace_dir, "Write one trace file per item here");
  eval->add_flag("--shared-graph", o.shared_graph, "Learn all context once instead of per item");
  eval->add_option("--item-parallelism", o.item_parallelism, "Items processed concurrently")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
      ->capture_default_str();
  eval->add_option("--limit", o.limit, "Only the first N items (0: all)");
  eval->add_flag("--reflect", o.reflect, "Reflect while learning");
  eval->add_option("--window", o.window, "Sentences per extraction window")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}))
      ->capture_default_str();
  eval->add_option("--learn-parallelism", o.learn_parallelism, "Concurrent extraction calls")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
      ->capture_default_str();
  CLI::Option* eval_max_iters = nullptr;
  add_retrieval_options(eval, o.rt, &eval_max_iters);
  eval_max_iters->description("Outer iteration limit (default 4, 5 for musique_ans)");
  add_annotator_options(eval, o);
  add_llm_options(eval, o.llm);

  auto* exp = app.add_subcommand("export", "Write the graph as property-graph CREATE statements");
  exp->add_option("--graph", o.graph, "Graph file")->required()->check(CLI::ExistingFile);
  exp->add_option("-o,--out", o.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "lgm: " << e.what() << "\n";
    if (!app.get_subcommands().empty())
      err << "run 'lgm " << app.get_subcommands().front()->get_name() << " --help' for usage\n";
    else
      err << "run 'lgm --help' for usage\n";
    return kExitUsage;
  }

  try {
    std::optional<PromptCatalog> catalog;
    if (!o.prompts_dir.empty()) catalog = PromptCatalog::with_overrides(o.prompts_dir);
    const PromptCatalog* prompts = catalog ? &*catalog : nullptr;
    if (eval->parsed() && o.annotator == "preannotated") {
      throw UsageError("eval reads raw context; use --annotator builtin or process");
    }
    if (learn->parsed()) return cmd_learn(o, prompts, out, err);
    if (query->parsed()) return cmd_query(o, prompts, out, err);
    if (eval->parsed()) return cmd_eval(o, prompts, eval_max_iters, out, err);
    return cmd_export(o, out);
  } catch (const UsageError& e) {
    err << "lgm: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "lgm: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace lgm::cli
