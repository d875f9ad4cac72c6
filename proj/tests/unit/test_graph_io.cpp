#include <unistd.h>

#include <filesystem>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "lgm/error.hpp"
#include "lgm/graph_io.hpp"
#include "lgm/nlp.hpp"

using namespace lgm;

namespace {

LanguageGraph apple_graph() {
  LanguageGraph g;
  g.metadata().created = "2024-01-01T00:00:00Z";
  g.metadata().sources = {"apple.txt"};
  auto sec = g.add_section("apple");
  for (const auto& s :
       annotate("Apples are a type of fruit. Fruits contain many vitamins. Apples are sweet."))
    g.add_sentence(sec, s);
  g.add_meta_relation(RelationKind::Inheritance, "apple", "fruit", {SentenceId{0}}, RelationStatus::Valid);
  g.add_meta_relation(RelationKind::Composition, "fruit", "vitamin", {SentenceId{1}},
                      RelationStatus::Unknown);
  return g;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lgm_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_SUITE("graph_io") {
  TEST_CASE("round trip through a file") {
    auto g = apple_graph();
    auto path = temp_path("apple.lgm");
    save_graph(g, path);
    auto back = load_graph(path);
    CHECK(back == g);
    CHECK(serialize_graph(back) == serialize_graph(g));
    std::filesystem::remove(path);
  }

  TEST_CASE("corrupt and unsupported files") {
    auto text = serialize_graph(apple_graph());
    auto truncated = text.substr(0, text.size() / 2);
    try {
      deserialize_graph(truncated);
      FAIL("truncated file loaded");
    } catch (const FormatError& e) {
      CHECK(e.position() > 0);
      CHECK(e.position() <= truncated.size());
    }
    auto v99 = text;
    v99.replace(v99.find("\"version\": 1"), 12, "\"version\": 99");
    try {
      deserialize_graph(v99);
      FAIL("version 99 loaded");
    } catch (const UnsupportedVersion& e) {
      CHECK(e.version() == 99);
    }
    CHECK_THROWS_AS(deserialize_graph("{\"format\":\"other\"}"), FormatError);
    CHECK_THROWS_AS(load_graph(temp_path("does-not-exist.lgm")), NotFound);
  }

  TEST_CASE("structural violations in a file are rejected") {
    auto text = serialize_graph(apple_graph());
    auto bad = text;
    bad.replace(bad.find("\"status\": \"valid\""), 17, "\"status\": \"invalid\"");
    CHECK_THROWS_AS(deserialize_graph(bad), FormatError);
  }

  TEST_CASE("cypher export") {
    LanguageGraph empty;
    auto e = export_cypher(empty);
    CHECK(e.find("CREATE (:Concept {id: 0, lemma: 'thing'});") != std::string::npos);
    CHECK(e.find(":Sentence") == std::string::npos);
    CHECK(e.find("MATCH") == std::string::npos);

    auto out = export_cypher(apple_graph());
    auto count = [&](std::string_view needle) {
      std::size_t n = 0;
      for (auto p = out.find(needle); p != std::string::npos; p = out.find(needle, p + 1)) ++n;
      return n;
    };
    CHECK(count("[:INHERITANCE ") == 1);
    CHECK(count("[:COMPOSITION ") == 1);
    CHECK(count("[:HAS_SENTENCE]") == 3);
    CHECK(count("CREATE (:Concept ") == 4);
    CHECK(count("[:MENTIONED_IN]") == apple_graph().mention_edges().size());
  }

  TEST_CASE("cypher strings are escaped") {
    LanguageGraph g;
    auto sec = g.add_section("it's");
    g.add_sentence(sec, "A 'quoted' \\ line.", "a quote line .");
    auto out = export_cypher(g);
    CHECK(out.find("title: 'it\\'s'") != std::string::npos);
    CHECK(out.find("sentence: 'A \\'quoted\\' \\\\ line.'") != std::string::npos);
  }
}
