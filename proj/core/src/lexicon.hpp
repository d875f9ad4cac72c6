#pragma once

#include <optional>
#include <string_view>

#include "lgm/nlp.hpp"

// Bundled English word lists for the built-in annotator. All lookups take
// lowercase words.
namespace lgm::lexicon {

/// Tag for closed-class words (determiners, pronouns, prepositions,
/// conjunctions, auxiliaries, particles, wh-words).
std::optional<Pos> closed_class(std::string_view word);

/// Lemma for closed-class words whose lemma differs from the word
/// ("is" -> "be", "has" -> "have", "did" -> "do").
std::optional<std::string_view> closed_class_lemma(std::string_view word);

bool is_verb(std::string_view base);
bool is_adjective(std::string_view word);
bool is_adverb(std::string_view word);
/// Common nouns that would otherwise be mistaken for verbs or adjectives.
bool is_noun(std::string_view base);

std::optional<std::string_view> irregular_verb(std::string_view form);
std::optional<std::string_view> irregular_noun(std::string_view form);

/// Singular nouns (and other words) ending in "s" that must not be stripped.
bool keeps_final_s(std::string_view word);

bool is_abbreviation(std::string_view word);
/// Abbreviations that precede a name and never end a sentence ("Dr.", "Mt.").
bool is_title_abbreviation(std::string_view word);

bool is_third_person_pronoun(std::string_view word);
bool is_plural_pronoun(std::string_view word);
bool is_determiner_like(std::string_view word);

}  // namespace lgm::lexicon
