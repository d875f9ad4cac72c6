#include "doctest.h"
#include "lgm/text.hpp"

using namespace lgm;

TEST_SUITE("text") {
  TEST_CASE("normalize_lemma lowercases, trims and collapses") {
    CHECK(normalize_lemma("  Nobel \t  Prize ") == "nobel prize");
    CHECK(normalize_lemma("") == "");
    CHECK(normalize_lemma("apple") == "apple");
  }

  TEST_CASE("lemma_tokens peels punctuation") {
    CHECK(lemma_tokens("it be sweet. [: apple]") ==
          std::vector<std::string>{"it", "be", "sweet", ".", "[", ":", "apple", "]"});
    CHECK(lemma_tokens("Apple") == std::vector<std::string>{"apple"});
    CHECK(lemma_tokens("   ").empty());
  }

  TEST_CASE("utf8_length counts code points") {
    CHECK(utf8_length("abc") == 3);
    CHECK(utf8_length("caf\xc3\xa9") == 4);
    CHECK(utf8_length("\xe6\x97\xa5\xe6\x9c\xac") == 2);
    CHECK(utf8_length("\xf0\x9f\x8d\x8e") == 1);
  }

  TEST_CASE("strip_code_fence") {
    CHECK(strip_code_fence("```json\n[1]\n```") == "[1]");
    CHECK(strip_code_fence("```\n{}\n```") == "{}");
    CHECK(strip_code_fence("  [1] ") == "[1]");
  }

  TEST_CASE("join and split") {
    CHECK(join({"a", "b", "c"}, ", ") == "a, b, c");
    CHECK(join({}, ",") == "");
    CHECK(split_whitespace(" a  b\nc ") == std::vector<std::string>{"a", "b", "c"});
  }
}
