#include "doctest.h"
#include "lgm/error.hpp"
#include "lgm/expansion.hpp"

using namespace lgm;

namespace {

ConceptSemantics sem(std::string lemma, LabelSet a, LabelSet b = {}, LabelSet act = {}) {
  return {std::move(lemma), std::move(a), std::move(b), std::move(act)};
}

}  // namespace

TEST_SUITE("expansion") {
  TEST_CASE("basic representation") {
    CHECK(basic_representation(sem("c", {"red"}, {"roll"}, {"fall"})) == LabelSet{"red", "roll", "fall"});
    CHECK(basic_representation(sem("c", {})).empty());
    CHECK(basic_representation(sem("c", {"red", "sweet"}, {"sweet"})) == LabelSet{"red", "sweet"});
  }

  TEST_CASE("extended representation") {
    SemanticsMap m;
    m.set(sem("apple", {"round"}, {}, {"fall"}));
    m.set(sem("fruit", {"vitamin-rich"}, {"ripen"}, {"rot"}));
    m.add_inheritance("apple", "fruit");
    // Parent attributes and abilities, not its actions.
    CHECK(extended_representation("apple", m) == LabelSet{"round", "fall", "vitamin-rich", "ripen"});

    SemanticsMap lone;
    lone.set(sem("rock", {"hard"}, {}, {"sit"}));
    CHECK(extended_representation("rock", lone) == LabelSet{"hard", "sit"});

    SemanticsMap kids;
    kids.set(sem("fruit", {"edible"}));
    kids.set(sem("apple", {"sweet", "round"}));
    kids.set(sem("banana", {"sweet", "long"}));
    kids.add_inheritance("apple", "fruit");
    kids.add_inheritance("banana", "fruit");
    CHECK(extended_representation("fruit", kids) == LabelSet{"edible", "sweet"});

    SemanticsMap parts;
    parts.set(sem("car", {"red"}));
    parts.set(sem("wheel", {"round"}, {"roll"}));
    parts.add_composition("car", "wheel");
    CHECK(extended_representation("car", parts) == LabelSet{"red", "roll"});
  }

  TEST_CASE("full representation over alias components") {
    SemanticsMap m;
    m.set(sem("ding", {"crisp"}));
    m.set(sem("ringo", {"japanese-name"}));
    CHECK(full_representation("ding", m) == extended_representation("ding", m));
    m.add_alias("ding", "ringo");
    CHECK(full_representation("ding", m) == LabelSet{"crisp", "japanese-name"});

    SemanticsMap chain;
    chain.set(sem("a", {"x"}));
    chain.set(sem("b", {"y"}));
    chain.set(sem("c", {"z"}));
    chain.add_alias("a", "b");
    chain.add_alias("b", "c");
    CHECK(alias_component("a", chain) == std::set<std::string>{"a", "b", "c"});
    CHECK(full_representation("c", chain) == LabelSet{"x", "y", "z"});
  }

  TEST_CASE("unknown lemmas") {
    SemanticsMap m;
    CHECK_THROWS_AS(m.at("ghost"), NotFound);
    CHECK_THROWS_AS(extended_representation("ghost", m), NotFound);
  }

  TEST_CASE("expand follows one hop") {
    LanguageGraph g;
    g.add_meta_relation(RelationKind::Inheritance, "apple", "fruit", {}, RelationStatus::Valid);
    g.add_meta_relation(RelationKind::Inheritance, "fruit", "food", {}, RelationStatus::Valid);
    auto x = expand({"apple"}, g);
    CHECK(x.lemmas() == std::vector<std::string>{"apple", "fruit"});
    CHECK(x.members[0] == ExpandedMember{"apple", Provenance::Seed});
    CHECK(x.members[1] == ExpandedMember{"fruit", Provenance::Parent});
    CHECK(expand({}, g).members.empty());
  }

  TEST_CASE("expand on a composition hub") {
    LanguageGraph g;
    g.add_meta_relation(RelationKind::Composition, "alitaya", "roo", {}, RelationStatus::Valid);
    g.add_meta_relation(RelationKind::Composition, "alitaya", "ting", {}, RelationStatus::Valid);
    g.add_meta_relation(RelationKind::Inheritance, "ding", "alitaya", {}, RelationStatus::Valid);
    g.add_meta_relation(RelationKind::Composition, "ting", "bark", {}, RelationStatus::Valid);
    auto x = expand({"alitaya"}, g);
    CHECK(x.lemmas() == std::vector<std::string>{"alitaya", "ding", "roo", "ting"});
    CHECK(x.members[1].provenance == Provenance::Child);
    CHECK(x.members[2].provenance == Provenance::Component);
  }

  TEST_CASE("expand keeps unknown seeds and never adds the root") {
    LanguageGraph g;
    g.add_meta_relation(RelationKind::Alias, "ding", "ringo", {}, RelationStatus::Valid);
    g.add_meta_relation(RelationKind::Inheritance, "ringo", "bing", {}, RelationStatus::Valid);
    auto x = expand({"Dings", "zorb", "thing"}, g);
    CHECK(x.seeds == std::vector<std::string>{"ding", "thing", "zorb"});
    CHECK(x.lemmas() == std::vector<std::string>{"bing", "ding", "ringo", "thing", "zorb"});
    for (const auto& m : x.members)
      if (m.lemma == "ringo") CHECK(m.provenance == Provenance::Alias);
  }
}
