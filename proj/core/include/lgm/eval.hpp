#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lgm/extractor.hpp"
#include "lgm/llm.hpp"
#include "lgm/prompts.hpp"
#include "lgm/retrieval.hpp"

namespace lgm {

enum class DatasetFormat { HotpotDistractor, MusiqueAns };
std::string_view to_string(DatasetFormat f);
/// Accepts "hotpotqa_distractor"/"hotpot" and "musique_ans"/"musique".
DatasetFormat parse_dataset_format(std::string_view name);

struct ContextDoc {
  std::string title;
  std::vector<std::string> paragraphs;

  std::string text() const;
  friend bool operator==(const ContextDoc&, const ContextDoc&) = default;
};

struct QAItem {
  std::string id;
  std::string question;
  std::string gold_answer;
  std::vector<ContextDoc> context_docs;
};

/// HotpotQA: one JSON array. MuSiQue: one JSON object per line. Throws
/// DatasetError naming the offending record; an empty dataset is an error.
std::vector<QAItem> load_dataset(const std::filesystem::path& path, DatasetFormat format);
std::vector<QAItem> parse_dataset(std::string_view text, DatasetFormat format);

enum class Verdict { Yes, No, Unsupport };
std::string_view to_string(Verdict v);

struct Judgment {
  Verdict verdict = Verdict::Unsupport;
  std::string raw;
};

/// First of Yes / No / Unsupport found in the reply, case-insensitively.
/// Returns false when none occurs.
bool parse_judgment(std::string_view reply, Verdict& out);

inline constexpr std::string_view kReaskJudgeMessage =
    "Your previous reply could not be parsed. Reply only 'Yes' or 'No' or 'Unsupport'.";

/// An empty answer is Unsupport without a call. Throws ResponseParseError
/// when the reply stays unreadable after one re-ask.
Judgment judge(std::string_view question, std::string_view model_answer, std::string_view gold,
               ChatClient& llm, const ChatParams& params = {}, const PromptCatalog* prompts = nullptr);

struct EvalMetrics {
  std::size_t n = 0;
  std::size_t unsupported = 0;
  std::size_t yes = 0;
  std::size_t no = 0;
  double recall = 0;
  double precision = 0;
  double f1 = 0;
};

/// recall = (N-U)/N, precision = Yes/(N-U), f1 = their harmonic mean; each
/// 0 when its denominator is.
EvalMetrics metrics(std::size_t n, std::size_t unsupported, std::size_t yes);
EvalMetrics metrics(const std::vector<Verdict>& verdicts);

struct EvalConfig {
  RetrievalConfig retrieval;
  LearnConfig learn;
  ChatParams judge_chat;
  bool shared_graph = false;  // learn every item's context once, up front
  std::size_t item_parallelism = 1;
  std::filesystem::path trace_dir;  // empty: traces are not written
};

/// Iteration budget per dataset: 4 for HotpotQA, 5 for MuSiQue.
RetrievalConfig default_retrieval_config(DatasetFormat format);

struct EvalRecord {
  std::string id;
  std::string question;
  std::string gold_answer;
  std::string answer;
  Verdict verdict = Verdict::Unsupport;
  std::string judge_raw;
  int iterations = 0;
  std::size_t supports = 0;
  std::string trace_ref;
  std::string error;
};

struct EvalReport {
  std::vector<EvalRecord> records;  // dataset order
  EvalMetrics metrics;
};

/// Learns the context (per item, or shared), answers, judges. Failures of a
/// single item become Unsupport with an error note and never stop the run.
/// `judge_llm` may be the same client as `llm`.
EvalReport run_eval(const std::vector<QAItem>& items, Annotator& annotator, ChatClient& llm,
                    ChatClient& judge_llm, const EvalConfig& config = {});

/// One JSON record per item, then a summary line. Byte-identical for
/// identical inputs regardless of parallelism.
std::string report_to_jsonl(const EvalReport& report);
std::string metrics_table(const EvalMetrics& m);

}  // namespace lgm
