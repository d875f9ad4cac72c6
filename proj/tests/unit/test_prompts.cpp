#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lgm/error.hpp"
#include "lgm/prompts.hpp"
#include "lgm/retrieval.hpp"

using namespace lgm;

TEST_SUITE("prompts") {
  TEST_CASE("built-in catalog") {
    const auto& c = PromptCatalog::builtin();
    CHECK(c.ids() == std::vector<std::string>{"extract_alias", "extract_composition", "extract_inheritance",
                                              "judge", "merge_response", "parallel_summary", "reflect"});
    CHECK_THROWS_AS(c.get("nope"), NotFound);
    for (const auto& id : c.ids()) {
      const auto& t = c.get(id);
      CHECK(t.id == id);
      REQUIRE_FALSE(t.messages.empty());
      CHECK(t.messages.front().role == Role::System);
      CHECK(t.messages.back().role == Role::User);
    }
  }

  TEST_CASE("judge renders the final user turn") {
    auto m = PromptCatalog::builtin().render(
        "judge", {{"question", "Q?"}, {"llm_answer", "A."}, {"standard_answer", "S"}});
    CHECK(m.back().content ==
          "Does the answer from the large model match the standard answer to the question?\n"
          "Question: Q?\nLarge model answer: A.\nStandard Answer: S");
    // Few-shot turns are untouched.
    CHECK(m[2].content == "Yes");
  }

  TEST_CASE("missing variables are an error") {
    CHECK_THROWS_AS(PromptCatalog::builtin().render("parallel_summary", {{"question", "q"}}),
                    InvalidArgument);
  }

  TEST_CASE("model-knowledge clause lands in the merge prompt") {
    const auto& c = PromptCatalog::builtin();
    PromptVars vars{{"descriptions", "{}"}, {"question", "q"}, {"note_text", ""}};
    vars["LLM_knowledge_support"] = std::string(model_knowledge_clause(false));
    auto off = c.render("merge_response", vars);
    CHECK(off.front().content.find(std::string(model_knowledge_clause(false))) != std::string::npos);
    CHECK(off.front().content.find("{LLM_knowledge_support}") == std::string::npos);
    vars["LLM_knowledge_support"] = std::string(model_knowledge_clause(true));
    auto on = c.render("merge_response", vars);
    CHECK(on.front().content != off.front().content);
  }

  TEST_CASE("literal braces survive rendering") {
    auto t = parse_prompt_template(R"({"id":"t","description":"d","placeholders":["x"],
      "messages":[{"role":"system","content":"Reply {\"a\": 1} or {}"},{"role":"user","content":"[{x}] {y}"}]})");
    auto m = render_prompt(t, {{"x", "{y}"}});
    CHECK(m[0].content == "Reply {\"a\": 1} or {}");
    // Substituted text is not rescanned.
    CHECK(m[1].content == "[{y}] {y}");
  }

  TEST_CASE("template validation") {
    CHECK_THROWS_AS(parse_prompt_template("{"), FormatError);
    CHECK_THROWS_AS(parse_prompt_template(R"({"id":"t","placeholders":["x"],
      "messages":[{"role":"user","content":"no placeholder"}]})"),
                    FormatError);
    CHECK_THROWS_AS(parse_prompt_template(R"({"id":"t","placeholders":[],
      "messages":[{"role":"robot","content":"x"}]})"),
                    FormatError);
  }

  TEST_CASE("directory overrides replace single templates") {
    auto dir = std::filesystem::temp_directory_path() / "lgm_prompt_override";
    std::filesystem::create_directories(dir);
    {
      std::ofstream out(dir / "judge.json");
      out << R"({"id":"judge","description":"short","placeholders":["question","llm_answer","standard_answer"],
        "messages":[{"role":"system","content":"Judge."},
                    {"role":"user","content":"{question}|{llm_answer}|{standard_answer}"}]})";
    }
    auto c = PromptCatalog::with_overrides(dir);
    auto m = c.render("judge", {{"question", "q"}, {"llm_answer", "a"}, {"standard_answer", "s"}});
    CHECK(m.size() == 2);
    CHECK(m[1].content == "q|a|s");
    CHECK(c.get("reflect").messages == PromptCatalog::builtin().get("reflect").messages);
    std::filesystem::remove_all(dir);
  }
}
