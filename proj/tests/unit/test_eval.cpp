#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "lgm/error.hpp"
#include "lgm/eval.hpp"
#include "lgm/scripted_llm.hpp"

using namespace lgm;
using test::FnChat;

namespace {

std::vector<QAItem> hotpot() {
  return load_dataset(test::fixture("hotpot3.json"), DatasetFormat::HotpotDistractor);
}

ScriptedChatClient eval_script() {
  return ScriptedChatClient(ScriptedChatClient::parse_script(test::slurp(test::fixture("eval.script.json"))));
}

// Wraps the fixture script; requests containing `poison` fail in transport.
class PoisonChat : public ChatClient {
 public:
  explicit PoisonChat(std::string poison) : inner_(eval_script()), poison_(std::move(poison)) {}
  std::string chat(const std::vector<ChatMessage>& m, const ChatParams& p) override {
    if (test::last_user(m).find(poison_) != std::string::npos) throw LlmError("connection reset", "x");
    return inner_.chat(m, p);
  }

 private:
  ScriptedChatClient inner_;
  std::string poison_;
};

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("dataset formats") {
    CHECK(parse_dataset_format("hotpotqa_distractor") == DatasetFormat::HotpotDistractor);
    CHECK(parse_dataset_format("musique_ans") == DatasetFormat::MusiqueAns);
    CHECK_THROWS_AS(parse_dataset_format("squad"), InvalidArgument);
    CHECK(default_retrieval_config(DatasetFormat::HotpotDistractor).max_iterations == 4);
    CHECK(default_retrieval_config(DatasetFormat::MusiqueAns).max_iterations == 5);
  }

  TEST_CASE("hotpot and musique fixtures load to the same items") {
    auto h = hotpot();
    auto m = load_dataset(test::fixture("musique3.jsonl"), DatasetFormat::MusiqueAns);
    REQUIRE(h.size() == 3);
    REQUIRE(m.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(h[i].context_docs.size() == 10);
      CHECK(h[i].question == m[i].question);
      CHECK(h[i].gold_answer == m[i].gold_answer);
      CHECK(h[i].context_docs.front().text() == m[i].context_docs.front().text());
    }
    CHECK(h[0].id == "q-apple");
    CHECK(h[2].gold_answer == "Bob Marsh");
  }

  TEST_CASE("context paragraphs join with single spaces") {
    ContextDoc d{"t", {"A b.", " C d. ", "E."}};
    CHECK(d.text() == "A b. C d. E.");
    CHECK(ContextDoc{"t", {}}.text().empty());
  }

  TEST_CASE("dataset errors name the record") {
    CHECK_THROWS_AS(parse_dataset("[]", DatasetFormat::HotpotDistractor), DatasetError);
    CHECK_THROWS_AS(parse_dataset("\n\n", DatasetFormat::MusiqueAns), DatasetError);
    CHECK_THROWS_AS(load_dataset("/nonexistent/x.json", DatasetFormat::HotpotDistractor), NotFound);
    try {
      parse_dataset(R"([{"_id":"a","question":"q?","answer":"x","context":[]},{"_id":"b","question":"q?"}])",
                    DatasetFormat::HotpotDistractor);
      FAIL("no error");
    } catch (const DatasetError& e) {
      CHECK(std::string(e.what()).find("record 1 (b)") != std::string::npos);
    }
    try {
      parse_dataset("{\"id\":\"a\",\"question\":\"q\",\"answer\":\"x\",\"paragraphs\":[]}\n{oops",
                    DatasetFormat::MusiqueAns);
      FAIL("no error");
    } catch (const DatasetError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  TEST_CASE("judgment parsing") {
    Verdict v;
    CHECK((parse_judgment("Yes", v) && v == Verdict::Yes));
    CHECK((parse_judgment("no.", v) && v == Verdict::No));
    CHECK((parse_judgment("  'Unsupport'", v) && v == Verdict::Unsupport));
    CHECK((parse_judgment("Unsupported", v) && v == Verdict::Unsupport));
    CHECK_FALSE(parse_judgment("Maybe later", v));
    CHECK_FALSE(parse_judgment("", v));
  }

  TEST_CASE("judge renders the judging prompt") {
    FnChat llm([](const auto&) { return std::string("Yes"); });
    auto j = judge("What retailer in ABQ Uptown is headquarted in Poole, Dorset, United Kingdom?",
                   "Lush Ltd. is headquartered in Poole, Dorset, UK.", "Lush Ltd.", llm);
    CHECK(j.verdict == Verdict::Yes);
    CHECK(j.raw == "Yes");
    auto seen = llm.seen();
    REQUIRE(seen.size() == 1);
    CHECK(test::last_user(seen[0]) ==
          "Does the answer from the large model match the standard answer to the question?\n"
          "Question: What retailer in ABQ Uptown is headquarted in Poole, Dorset, United Kingdom?\n"
          "Large model answer: Lush Ltd. is headquartered in Poole, Dorset, UK.\n"
          "Standard Answer: Lush Ltd.");
  }

  TEST_CASE("empty answers are Unsupport without a call") {
    FnChat llm([](const auto&) { return std::string("Yes"); });
    CHECK(judge("q", "", "gold", llm).verdict == Verdict::Unsupport);
    CHECK(judge("q", "  \n", "gold", llm).verdict == Verdict::Unsupport);
    CHECK(llm.calls() == 0);
  }

  TEST_CASE("judge re-asks once") {
    int n = 0;
    FnChat once([&](const auto&) { return std::string(n++ ? "No" : "I think so"); });
    CHECK(judge("q", "a", "g", once).verdict == Verdict::No);
    CHECK(once.calls() == 2);
    CHECK(test::last_user(once.seen()[1]) == kReaskJudgeMessage);
    FnChat never([](const auto&) { return std::string("hmm"); });
    CHECK_THROWS_AS(judge("q", "a", "g", never), ResponseParseError);
  }

  TEST_CASE("metrics") {
    auto a = metrics(328, 3, 300);
    CHECK(a.recall == doctest::Approx(325.0 / 328.0));
    CHECK(std::round(a.recall * 10000) / 10000 == doctest::Approx(0.9909));
    auto b = metrics(10, 10, 0);
    CHECK(b.recall == 0);
    CHECK(b.precision == 0);
    CHECK(b.f1 == 0);
    auto c = metrics(4, 1, 3);
    CHECK(c.recall == doctest::Approx(0.75));
    CHECK(c.precision == doctest::Approx(1.0));
    CHECK(c.f1 == doctest::Approx(2 * 0.75 / 1.75));
    CHECK(c.no == 0);
    CHECK(metrics(0, 0, 0).recall == 0);
    CHECK_THROWS_AS(metrics(3, 2, 2), InvalidArgument);
    auto v = metrics({Verdict::No, Verdict::Yes, Verdict::Unsupport, Verdict::Yes});
    auto w = metrics({Verdict::Yes, Verdict::Unsupport, Verdict::Yes, Verdict::No});
    CHECK(v.n == 4);
    CHECK(v.yes == 2);
    CHECK(v.no == 1);
    CHECK(v.unsupported == 1);
    CHECK(v.f1 == w.f1);
  }

  TEST_CASE("end-to-end: two answered correctly, one unsupported") {
    auto llm = eval_script();
    FnChat judge_llm([](const auto&) { return std::string("Yes"); });
    BuiltinAnnotator ann;
    EvalConfig cfg;
    cfg.retrieval = default_retrieval_config(DatasetFormat::HotpotDistractor);
    auto r = run_eval(hotpot(), ann, llm, judge_llm, cfg);
    CHECK(r.metrics.n == 3);
    CHECK(r.metrics.unsupported == 1);
    CHECK(r.metrics.yes == 2);
    CHECK(r.metrics.recall == doctest::Approx(2.0 / 3.0));
    CHECK(judge_llm.calls() == 2);
    CHECK(r.records[0].answer == "Apples are rich in vitamins.");
    CHECK(r.records[2].answer.empty());
    CHECK(r.records[2].iterations == 4);
  }

  TEST_CASE("the fixture judge rejects the wrong colour") {
    auto llm = eval_script();
    BuiltinAnnotator ann;
    auto r = run_eval(hotpot(), ann, llm, llm);
    CHECK(r.metrics.yes == 1);
    CHECK(r.metrics.no == 1);
    CHECK(r.records[1].verdict == Verdict::No);
    CHECK(r.records[1].judge_raw == "No");
  }

  TEST_CASE("run_eval errors and isolation") {
    auto llm = eval_script();
    BuiltinAnnotator ann;
    CHECK_THROWS_AS(run_eval({}, ann, llm, llm), InvalidArgument);

    PoisonChat poison("The Zorb is a blue ball.");
    auto r = run_eval(hotpot(), ann, poison, poison);
    CHECK(r.records[1].verdict == Verdict::Unsupport);
    CHECK(r.records[1].error.find("connection reset") != std::string::npos);
    CHECK(r.records[0].verdict == Verdict::Yes);
    CHECK(r.records[0].error.empty());
    CHECK(r.metrics.unsupported == 2);
  }

  TEST_CASE("report bytes do not depend on parallelism") {
    auto dir = std::filesystem::temp_directory_path() / "lgm_eval_traces";
    std::filesystem::remove_all(dir);
    std::string reports[2];
    for (int k = 0; k < 2; ++k) {
      auto llm = eval_script();
      BuiltinAnnotator ann;
      EvalConfig cfg;
      cfg.item_parallelism = k ? 4 : 1;
      cfg.learn.parallelism = k ? 4 : 1;
      cfg.retrieval.parallelism = k ? 4 : 1;
      cfg.trace_dir = dir / std::to_string(k);
      reports[k] = report_to_jsonl(run_eval(hotpot(), ann, llm, llm, cfg));
      CHECK(std::filesystem::exists(cfg.trace_dir / "0_q-apple.jsonl"));
    }
    CHECK(reports[0] == reports[1]);
    CHECK(test::slurp(dir / "0" / "1_q-zorb.jsonl") == test::slurp(dir / "1" / "1_q-zorb.jsonl"));
    auto last = reports[0].substr(reports[0].rfind('\n', reports[0].size() - 2) + 1);
    auto summary = nlohmann::json::parse(last)["summary"];
    CHECK(summary["n"] == 3);
    CHECK(summary["unsupported"] == 1);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("shared graph mode gives the same verdicts") {
    auto llm = eval_script();
    BuiltinAnnotator ann;
    EvalConfig cfg;
    cfg.shared_graph = true;
    auto r = run_eval(hotpot(), ann, llm, llm, cfg);
    CHECK(r.metrics.yes == 1);
    CHECK(r.metrics.no == 1);
    CHECK(r.metrics.unsupported == 1);
  }
}
