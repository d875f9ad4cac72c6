#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "lgm/error.hpp"
#include "lgm/extractor.hpp"
#include "lgm/graph_io.hpp"
#include "lgm/scripted_llm.hpp"

using namespace lgm;
using test::FnChat;

namespace {

std::string reply_for(const std::vector<ChatMessage>& m, std::string inh, std::string comp = "[{}]",
                      std::string alias = "[{}]") {
  if (test::system_has(m, test::kSysInheritance)) return inh;
  if (test::system_has(m, test::kSysComposition)) return comp;
  if (test::system_has(m, test::kSysAlias)) return alias;
  return "unknown";
}

LanguageGraph bing_graph() {
  LanguageGraph g;
  auto sec = g.add_section("bing");
  for (const auto& s : annotate(test::slurp(test::fixture("bing/bing.txt")))) g.add_sentence(sec, s);
  return g;
}

}  // namespace

TEST_SUITE("extractor") {
  TEST_CASE("inheritance extraction lemmatizes entities") {
    FnChat llm([](const auto& m) {
      return reply_for(m,
                       R"([{"sentence":"Men belong to humans .","subclass":"Men","parent_class":"humans"}])");
    });
    auto c = extract_relations(RelationKind::Inheritance, annotate("Men belong to humans ."), llm);
    REQUIRE(c.size() == 1);
    CHECK(c[0].subject == "man");
    CHECK(c[0].objects == std::vector<std::string>{"human"});
    CHECK(c[0].status == CandidateStatus::Pending);
    CHECK(test::last_user(llm.seen()[0]) == "Men belong to humans .");
  }

  TEST_CASE("composition and empty alias replies") {
    FnChat llm([](const auto& m) {
      return reply_for(m, "[{}]",
                       R"([{"sentence":"Water is composed of hydrogen and oxygen.","entity":"Water",
                            "components":["hydrogen","oxygen"]}])");
    });
    auto c = extract_relations(RelationKind::Composition,
                               annotate("Water is composed of hydrogen and oxygen."), llm);
    REQUIRE(c.size() == 1);
    CHECK(c[0].subject == "water");
    CHECK(c[0].objects == std::vector<std::string>{"hydrogen", "oxygen"});
    CHECK(extract_relations(RelationKind::Alias, annotate("Apple is a kind of fruit."), llm).empty());
  }

  TEST_CASE("one re-ask, then a parse error") {
    int calls = 0;
    FnChat fixed([&](const auto&) { return ++calls == 1 ? std::string("sure! here") : std::string("[{}]"); });
    CHECK(extract_relations(RelationKind::Alias, annotate("A is B."), fixed).empty());
    CHECK(fixed.calls() == 2);
    auto seen = fixed.seen();
    CHECK(seen[1].back().content == kReaskMessage);
    CHECK(seen[1][seen[1].size() - 2].content == "sure! here");

    FnChat broken([](const auto&) { return std::string("no json"); });
    CHECK_THROWS_AS(extract_relations(RelationKind::Alias, annotate("A is B."), broken), ResponseParseError);
    CHECK(broken.calls() == 2);
  }

  TEST_CASE("parse_extraction edge cases") {
    CHECK(parse_extraction(RelationKind::Alias, "[{}]").empty());
    CHECK(parse_extraction(RelationKind::Alias, "{}").empty());
    CHECK(parse_extraction(RelationKind::Alias, "```json\n[{\"A\":\"UN\",\"B\":\"United Nations\"}]\n```")
              .size() == 1);
    CHECK_THROWS_AS(parse_extraction(RelationKind::Alias, "[{\"A\":\"x\"}]"), ResponseParseError);
    CHECK_THROWS_AS(parse_extraction(RelationKind::Composition, "[{\"entity\":\"x\"}]"), ResponseParseError);
    CHECK_THROWS_AS(parse_extraction(RelationKind::Inheritance, "42"), ResponseParseError);
  }

  TEST_CASE("resolve_entity follows coreference marks") {
    CHECK(resolve_entity("It", "It [: Apple ] is sweet.") == "apple");
    CHECK(resolve_entity("It [: An apple ]", "whatever") == "apple");
    CHECK(resolve_entity("Apples", "") == "apple");
    CHECK(resolve_entity("it", "no marks here") == "");
  }

  TEST_CASE("reflection evidence drops sentences that state the candidate") {
    auto g = bing_graph();
    RelationCandidate c{RelationKind::Inheritance, "Ding is a type of bing.", "ding", {"bing"}};
    auto ev = reflection_evidence(c, g);
    std::vector<std::string> removed, kept;
    for (auto id : ev.removed) removed.push_back(g.sentence(id).sentence);
    for (auto id : ev.kept) kept.push_back(g.sentence(id).sentence);
    CHECK(removed == std::vector<std::string>{"Ding is a type of bing."});
    CHECK(std::find(kept.begin(), kept.end(), "Ding is a type of bong.") != kept.end());
    CHECK(std::find(kept.begin(), kept.end(), "Dings offer multiple health benefits.") != kept.end());
  }

  TEST_CASE("reflect") {
    auto g = bing_graph();
    FnChat llm([](const auto& m) {
      const auto& u = test::last_user(m);
      if (u.find("ding is a kind of bing") != std::string::npos) return std::string("Valid.");
      if (u.find("ding is a kind of dong") != std::string::npos) return std::string("invalid");
      return std::string("maybe");
    });
    RelationCandidate ok{RelationKind::Inheritance, "", "ding", {"bing"}};
    auto v = reflect(ok, g, llm);
    CHECK(v.status == RelationStatus::Valid);
    CHECK(v.rationale == "Valid.");
    // The prompt never sees the sentence that states the relation.
    CHECK(test::last_user(llm.seen()[0]).find("Ding is a type of bing.") == std::string::npos);

    RelationCandidate wrong{RelationKind::Inheritance, "", "ding", {"dong"}};
    CHECK(reflect(wrong, g, llm).status == RelationStatus::Invalid);

    auto before = llm.calls();
    RelationCandidate nothing{RelationKind::Alias, "", "zorb", {"quux"}};
    CHECK(reflect(nothing, g, llm).status == RelationStatus::Unknown);
    CHECK(llm.calls() == before);

    RelationCandidate vague{RelationKind::Composition, "", "bing", {"seed"}};
    CHECK_THROWS_AS(reflect(vague, g, llm), ResponseParseError);
  }

  TEST_CASE("parse_verdict") {
    RelationStatus s;
    CHECK((parse_verdict("valid", s) && s == RelationStatus::Valid));
    CHECK((parse_verdict("  Invalid: no evidence", s) && s == RelationStatus::Invalid));
    CHECK((parse_verdict("**unknown**", s) && s == RelationStatus::Unknown));
    CHECK_FALSE(parse_verdict("I think it is valid", s));
    CHECK_FALSE(parse_verdict("", s));
  }

  TEST_CASE("learning the apple document") {
    auto entries = ScriptedChatClient::parse_script(test::slurp(test::fixture("apple/apple.script.json")));
    ScriptedChatClient llm(entries);
    LanguageGraph g;
    BuiltinAnnotator ann;
    auto r = learn_text("apple", test::slurp(test::fixture("apple/apple.txt")), ann, g, llm);
    CHECK(r.sentences == 3);
    CHECK(r.candidates == 2);
    CHECK(r.accepted == 2);
    CHECK(r.balanced());
    REQUIRE(g.find_concept("apple"));
    REQUIRE(g.find_concept("fruit"));
    CHECK(g.parents(*g.find_concept("apple")) == std::vector<ConceptId>{*g.find_concept("fruit")});
    CHECK(g.sections().back().title == "apple");
    // Evidence points at the stating sentence.
    CHECK(g.sentence(g.meta_edges()[0].evidence.at(0)).sentence == "Apples are a type of fruit.");
  }

  TEST_CASE("empty document leaves the graph alone") {
    FnChat llm([](const auto&) { return std::string("[{}]"); });
    LanguageGraph g;
    BuiltinAnnotator ann;
    auto before = serialize_graph(g);
    auto r = learn_text("empty", "   ", ann, g, llm);
    CHECK(r.sentences == 0);
    CHECK(r.candidates == 0);
    CHECK(serialize_graph(g) == before);
    CHECK(learn_document({"empty", {}}, g, llm).candidates == 0);
    CHECK(llm.calls() == 0);
  }

  TEST_CASE("reflection filter on the nonsense-word corpus") {
    ScriptedChatClient llm(
        ScriptedChatClient::parse_script(test::slurp(test::fixture("bing/bing.script.json"))));
    LanguageGraph g;
    BuiltinAnnotator ann;
    LearnConfig cfg;
    cfg.reflect = true;
    auto r = learn_text("bing", test::slurp(test::fixture("bing/bing.txt")), ann, g, llm, cfg);
    CHECK(r.candidates == 3);
    CHECK(r.accepted == 1);
    CHECK(r.rejected == 1);
    CHECK(r.unknown == 1);
    CHECK(r.balanced());
    for (const auto& e : g.meta_edges()) CHECK(e.status != RelationStatus::Invalid);
    auto ding = *g.find_concept("ding");
    CHECK(g.parents(ding) == std::vector<ConceptId>{*g.find_concept("bing")});
  }

  TEST_CASE("failures are counted, not thrown") {
    FnChat llm([](const auto& m) {
      return reply_for(m, "garbage", R"([{"entity":"apple","components":["apple"]}])");
    });
    LanguageGraph g;
    BuiltinAnnotator ann;
    auto r = learn_text("d", "Apples are round. Apples are red.", ann, g, llm);
    // One failed inheritance window (two bad replies), one self-loop.
    CHECK(r.failures == 2);
    CHECK(r.candidates == 2);
    CHECK(r.balanced());
    CHECK(r.problems.size() == 2);
  }

  TEST_CASE("transport errors propagate with the document id") {
    FnChat llm([](const auto&) -> std::string { throw LlmError("connection refused", "d"); });
    LanguageGraph g;
    BuiltinAnnotator ann;
    CHECK_THROWS_WITH_AS(learn_text("doc-42", "A is B.", ann, g, llm), doctest::Contains("doc-42"), LlmError);
  }

  TEST_CASE("property: reports balance and no invalid edge is stored") {
    std::mt19937 rng(99);
    const std::vector<std::string> names = {"apple", "fruit", "food", "Ding", "bing", "it", "the"};
    for (int round = 0; round < 40; ++round) {
      auto seed = rng();
      FnChat llm([seed, &names](const std::vector<ChatMessage>& m) {
        std::mt19937 local(seed ^ static_cast<unsigned>(std::hash<std::string>{}(test::last_user(m))));
        auto pick = [&] { return names[local() % names.size()]; };
        if (m.front().content.find("candidate concept relation") != std::string::npos) {
          static const char* verdicts[] = {"valid", "invalid", "unknown", "?"};
          return std::string(verdicts[local() % 4]);
        }
        switch (local() % 4) {
          case 0: return std::string("not json");
          case 1: return std::string("[{}]");
          default: {
            nlohmann::json arr = nlohmann::json::array();
            int n = 1 + static_cast<int>(local() % 3);
            for (int i = 0; i < n; ++i) {
              arr.push_back({{"sentence", "x"},
                             {"subclass", pick()},
                             {"parent_class", pick()},
                             {"entity", pick()},
                             {"components", {pick(), pick()}},
                             {"A", pick()},
                             {"B", pick()}});
            }
            return arr.dump();
          }
        }
      });
      LanguageGraph g;
      BuiltinAnnotator ann;
      LearnConfig cfg;
      cfg.reflect = rng() % 2;
      cfg.window_size = 1 + rng() % 3;
      auto r = learn_text("d", "Apple is fruit. Fruit is food. Ding is a bing. It is red.", ann, g, llm, cfg);
      CHECK(r.balanced());
      CHECK(r.sentences == 4);
      for (const auto& e : g.meta_edges()) CHECK(e.status != RelationStatus::Invalid);
    }
  }
}
