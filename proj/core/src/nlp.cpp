#include "lgm/nlp.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <unordered_set>

#include "lexicon.hpp"
#include "lgm/error.hpp"
#include "lgm/text.hpp"

namespace lgm {
namespace {

namespace lex = lexicon;

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}
bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}
bool is_upper(char c) {
  return std::isupper(static_cast<unsigned char>(c)) != 0;
}
bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}
bool is_vowel(char c) {
  return std::string_view("aeiouy").find(c) != std::string_view::npos;
}
bool ends_with(std::string_view s, std::string_view suf) {
  return s.size() >= suf.size() && s.substr(s.size() - suf.size()) == suf;
}
bool has_vowel(std::string_view s) {
  return std::any_of(s.begin(), s.end(), is_vowel);
}

// ---------------------------------------------------------------------------
// Tokenization

enum class ItemKind { Word, Punct, Mark };

struct Item {
  ItemKind kind;
  std::size_t begin;
  std::size_t end;
  std::string text;  // for marks: the antecedent content, trimmed
};

// Matches "[:" or "[ :" at i and returns the index one past the closing "]".
std::optional<std::size_t> mark_end_at(std::string_view s, std::size_t i) {
  if (i >= s.size() || s[i] != '[') return std::nullopt;
  std::size_t j = i + 1;
  while (j < s.size() && s[j] == ' ') ++j;
  if (j >= s.size() || s[j] != ':') return std::nullopt;
  auto close = s.find(']', j);
  auto reopen = s.find('[', j);
  if (close == std::string_view::npos) return std::nullopt;
  if (reopen != std::string_view::npos && reopen < close) return std::nullopt;
  return close + 1;
}

std::string mark_content(std::string_view s, std::size_t begin, std::size_t end) {
  auto colon = s.find(':', begin);
  return std::string(trim(s.substr(colon + 1, end - 1 - (colon + 1))));
}

std::vector<Item> tokenize(std::string_view s) {
  std::vector<Item> items;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (auto end = mark_end_at(s, i)) {
      items.push_back({ItemKind::Mark, i, *end, mark_content(s, i, *end)});
      i = *end;
      continue;
    }
    if (!is_word_byte(c)) {
      // "n't" and "'s" style clitics start with an apostrophe.
      if (c == '\'' && i + 1 < s.size()) {
        std::size_t j = i + 1;
        while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
        auto clitic = to_lower(s.substr(i, j - i));
        if ((clitic == "'s" || clitic == "'re" || clitic == "'ve" || clitic == "'ll" || clitic == "'d" ||
             clitic == "'m") &&
            !items.empty() && items.back().end == i && items.back().kind == ItemKind::Word) {
          items.push_back({ItemKind::Word, i, j, std::string(s.substr(i, j - i))});
          i = j;
          continue;
        }
      }
      items.push_back({ItemKind::Punct, i, i + 1, std::string(1, c)});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size()) {
      char d = s[j];
      if (is_word_byte(d)) {
        ++j;
        continue;
      }
      bool next_word = j + 1 < s.size() && is_word_byte(s[j + 1]);
      if ((d == '-' || d == '.') && next_word) {
        ++j;
        continue;
      }
      if (d == ',' && next_word && j > i && is_digit(s[j - 1]) && is_digit(s[j + 1])) {
        ++j;
        continue;
      }
      if (d == '\'' && next_word) {
        // Split possessive/contracted clitics; keep word-internal apostrophes.
        std::size_t k = j + 1;
        while (k < s.size() && std::isalpha(static_cast<unsigned char>(s[k]))) ++k;
        auto clitic = to_lower(s.substr(j, k - j));
        bool at_word_end = k >= s.size() || !is_word_byte(s[k]);
        if (at_word_end && (clitic == "'s" || clitic == "'re" || clitic == "'ve" || clitic == "'ll" ||
                            clitic == "'d" || clitic == "'m")) {
          break;
        }
        ++j;
        continue;
      }
      break;
    }
    // "don't" -> "do" "n't"
    auto word = s.substr(i, j - i);
    auto lower = to_lower(word);
    if (ends_with(lower, "n't") && lower.size() > 3) {
      std::size_t split = j - 3;
      if (lower == "can't") split = j - 2;  // "ca" is not useful; keep "can" + "'t"
      items.push_back({ItemKind::Word, i, split, std::string(s.substr(i, split - i))});
      items.push_back({ItemKind::Word, split, j, std::string(s.substr(split, j - split))});
      i = j;
      continue;
    }
    // Abbreviations and dotted acronyms keep their final period.
    if (j < s.size() && s[j] == '.' &&
        (lex::is_abbreviation(lower) || lower.find('.') != std::string::npos ||
         (word.size() == 1 && is_upper(word[0])))) {
      ++j;
    }
    items.push_back({ItemKind::Word, i, j, std::string(s.substr(i, j - i))});
    i = j;
  }
  return items;
}

bool is_terminal(const Item& it) {
  return it.kind == ItemKind::Punct && (it.text == "." || it.text == "!" || it.text == "?");
}
bool is_closer(const Item& it) {
  return it.kind == ItemKind::Punct &&
         (it.text == "\"" || it.text == "'" || it.text == ")" || it.text == "]");
}

// Sentence ranges over the item stream, [first, last).
std::vector<std::pair<std::size_t, std::size_t>> split_sentences(std::string_view raw,
                                                                 const std::vector<Item>& items) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  auto paragraph_break = [&](std::size_t from, std::size_t to) {
    auto gap = raw.substr(from, to - from);
    auto nl = gap.find('\n');
    return nl != std::string_view::npos && gap.find('\n', nl + 1) != std::string_view::npos;
  };
  for (std::size_t k = 0; k < items.size(); ++k) {
    bool boundary = false;
    const auto& it = items[k];
    if (is_terminal(it)) {
      boundary = true;
    } else if (it.kind == ItemKind::Word && it.text.size() > 1 && it.text.back() == '.') {
      auto stem = to_lower(std::string_view(it.text).substr(0, it.text.size() - 1));
      bool title = lex::is_title_abbreviation(stem) || it.text.size() == 2;
      if (!title) {
        boundary =
            k + 1 >= items.size() || (items[k + 1].kind == ItemKind::Word && is_upper(items[k + 1].text[0]));
      }
    }
    if (!boundary && k + 1 < items.size() && paragraph_break(it.end, items[k + 1].begin)) {
      boundary = true;
    }
    if (!boundary) continue;
    // Terminal must be followed by whitespace, a closer, a mark, or the end.
    if (is_terminal(it) && it.end < raw.size() && !is_space(raw[it.end]) &&
        !(k + 1 < items.size() &&
          (is_closer(items[k + 1]) || is_terminal(items[k + 1]) || items[k + 1].kind == ItemKind::Mark))) {
      continue;
    }
    std::size_t end = k + 1;
    while (end < items.size() &&
           (is_closer(items[end]) || is_terminal(items[end]) || items[end].kind == ItemKind::Mark)) {
      ++end;
    }
    out.emplace_back(start, end);
    start = end;
    k = end - 1;
  }
  if (start < items.size()) out.emplace_back(start, items.size());
  // Drop sentences made only of marks/punctuation.
  std::erase_if(out, [&](const auto& r) {
    for (auto k = r.first; k < r.second; ++k) {
      if (items[k].kind == ItemKind::Word) return false;
    }
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Lemmatization

std::string noun_singular(const std::string& w) {
  if (auto irr = lex::irregular_noun(w)) return std::string(*irr);
  if (w.size() <= 3 || lex::keeps_final_s(w)) return w;
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
  if (ends_with(w, "ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  for (auto suf : {"ches", "shes", "sses", "xes", "zes"}) {
    if (ends_with(w, suf)) return w.substr(0, w.size() - 2);
  }
  if (ends_with(w, "s") && !ends_with(w, "'s")) return w.substr(0, w.size() - 1);
  return w;
}

// Known verb base for an inflected form, if the lexicon recognizes one.
std::optional<std::string> known_verb_base(const std::string& w) {
  if (auto irr = lex::irregular_verb(w)) return std::string(*irr);
  if (lex::is_verb(w)) return w;
  auto try_base = [](std::string b) -> std::optional<std::string> {
    if (!b.empty() && lex::is_verb(b)) return b;
    return std::nullopt;
  };
  auto undouble = [](const std::string& b) -> std::string {
    if (b.size() >= 3 && b[b.size() - 1] == b[b.size() - 2] && !is_vowel(b.back())) {
      return b.substr(0, b.size() - 1);
    }
    return b;
  };
  if (ends_with(w, "ies") && w.size() > 4) {
    if (auto b = try_base(w.substr(0, w.size() - 3) + "y")) return b;
  }
  if (ends_with(w, "es")) {
    if (auto b = try_base(w.substr(0, w.size() - 2))) return b;
  }
  if (ends_with(w, "s") && !ends_with(w, "ss")) {
    if (auto b = try_base(w.substr(0, w.size() - 1))) return b;
  }
  if (ends_with(w, "ied") && w.size() > 4) {
    if (auto b = try_base(w.substr(0, w.size() - 3) + "y")) return b;
  }
  if (ends_with(w, "ed") && w.size() > 3) {
    auto stem = w.substr(0, w.size() - 2);
    if (auto b = try_base(w.substr(0, w.size() - 1))) return b;
    if (auto b = try_base(stem)) return b;
    if (auto b = try_base(undouble(stem))) return b;
  }
  if (ends_with(w, "ing") && w.size() > 4) {
    auto stem = w.substr(0, w.size() - 3);
    if (auto b = try_base(stem)) return b;
    if (auto b = try_base(stem + "e")) return b;
    if (auto b = try_base(undouble(stem))) return b;
  }
  return std::nullopt;
}

// Heuristic base for -ed/-ing forms the lexicon does not know.
std::string guess_verb_base(const std::string& w) {
  std::string stem;
  if (ends_with(w, "ied") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  if (ends_with(w, "eed")) return w.substr(0, w.size() - 1);
  if (ends_with(w, "ed")) {
    stem = w.substr(0, w.size() - 2);
  } else if (ends_with(w, "ing")) {
    stem = w.substr(0, w.size() - 3);
  } else {
    return w;
  }
  if (stem.size() >= 3 && stem[stem.size() - 1] == stem[stem.size() - 2] && !is_vowel(stem.back()) &&
      stem.back() != 'l' && stem.back() != 's' && stem.back() != 'z' && stem.back() != 'f') {
    return stem.substr(0, stem.size() - 1);
  }
  for (auto suf : {"at", "bl", "iz", "ur", "us", "ag", "iv", "ov", "uc", "ac", "ic", "dl", "tl", "pl", "g"}) {
    if (ends_with(stem, suf) && !ends_with(stem, "ng")) return stem + "e";
  }
  return stem;
}

bool looks_like_unknown_participle(const std::string& w) {
  if (ends_with(w, "eed")) return false;
  if (ends_with(w, "ed") && w.size() > 4) return has_vowel(w.substr(0, w.size() - 2));
  if (ends_with(w, "ing") && w.size() > 5) {
    auto stem = w.substr(0, w.size() - 3);
    return stem.size() >= 3 && has_vowel(stem);
  }
  return false;
}

bool adverb_suffix(const std::string& w) {
  static const std::unordered_set<std::string> not_adverbs = {
      "family",   "supply",   "reply",   "belly",     "jelly", "ally", "lily",  "fly",
      "italy",    "assembly", "anomaly", "butterfly", "rally", "july", "bully", "apply",
      "monopoly", "holy",     "ugly",    "early",     "daily", "only"};
  return w.size() >= 5 && ends_with(w, "ly") && !not_adverbs.contains(w);
}

bool adjective_suffix(const std::string& w) {
  if (w.size() < 6) return false;
  for (auto suf : {"ous", "ful", "ive", "able", "ible", "less", "ical"}) {
    if (ends_with(w, suf)) return true;
  }
  return false;
}

bool is_number(std::string_view w) {
  bool digit = false;
  for (char c : w) {
    if (is_digit(c)) {
      digit = true;
    } else if (c != ',' && c != '.' && c != '-') {
      return false;
    }
  }
  return digit;
}

// ---------------------------------------------------------------------------
// Tagging

struct TagResult {
  Pos pos;
  std::string lemma;
  bool unknown_capitalized = false;
};

TagResult tag_word(const std::string& surface, bool sentence_initial, Pos prev) {
  const std::string lower = to_lower(surface);
  if (is_number(lower)) return {Pos::Num, lower};
  if (auto cc = lex::closed_class(lower)) {
    auto lemma = lex::closed_class_lemma(lower);
    // "'s" after a noun is possessive; as a verb clitic it is "be".
    if (lower == "'s") return {Pos::Part, "'s"};
    return {*cc, lemma ? std::string(*lemma) : lower};
  }
  const bool capitalized = is_upper(surface[0]);
  if (capitalized && !sentence_initial) return {Pos::PropNoun, lower};

  const bool after_modifier = prev == Pos::Det || prev == Pos::Adj;
  if (auto irr = lex::irregular_noun(lower)) return {Pos::Noun, std::string(*irr)};
  if (lex::is_adverb(lower) || (!capitalized && adverb_suffix(lower))) return {Pos::Adv, lower};
  if (lex::is_adjective(lower)) return {Pos::Adj, lower};
  if (auto base = known_verb_base(lower)) {
    auto singular = noun_singular(lower);
    bool nominal_use = after_modifier || prev == Pos::Num;
    if (nominal_use && (lex::is_noun(singular) || lower == singular || ends_with(lower, "s"))) {
      return {Pos::Noun, singular};
    }
    if (!nominal_use && lex::is_noun(lower) && prev == Pos::Adp) return {Pos::Noun, lower};
    return {Pos::Verb, *base};
  }
  if (lex::is_noun(lower)) return {Pos::Noun, lower};
  if (!capitalized && adjective_suffix(lower)) return {Pos::Adj, lower};
  if (looks_like_unknown_participle(lower) && !after_modifier) {
    return {Pos::Verb, guess_verb_base(lower)};
  }
  return {Pos::Noun, noun_singular(lower), capitalized};
}

struct Tagged {
  std::vector<Token> tokens;
  std::vector<std::size_t> item_index;  // token -> item
};

Tagged tag_items(const std::vector<Item>& items, std::size_t first, std::size_t last) {
  Tagged out;
  Pos prev = Pos::Punct;
  bool initial = true;
  std::vector<bool> unknown_cap;
  for (auto k = first; k < last; ++k) {
    const auto& it = items[k];
    if (it.kind == ItemKind::Mark) continue;
    Token tok;
    tok.surface = it.text;
    if (it.kind == ItemKind::Punct) {
      tok.pos = Pos::Punct;
      tok.lemma = it.text;
      // Opening quotes/brackets keep the next word sentence-initial.
      unknown_cap.push_back(false);
    } else {
      auto r = tag_word(it.text, initial, prev);
      tok.pos = r.pos;
      tok.lemma = std::move(r.lemma);
      unknown_cap.push_back(r.unknown_capitalized);
      initial = false;
    }
    prev = tok.pos;
    out.item_index.push_back(k);
    out.tokens.push_back(std::move(tok));
  }
  // A sentence-initial unknown capitalized word that starts a proper-noun run
  // is itself a proper noun ("Albert Einstein").
  for (std::size_t t = 0; t + 1 < out.tokens.size(); ++t) {
    if (unknown_cap[t] && out.tokens[t + 1].pos == Pos::PropNoun) {
      out.tokens[t].pos = Pos::PropNoun;
      out.tokens[t].lemma = to_lower(out.tokens[t].surface);
    }
  }
  return out;
}

// Lemma of a free phrase (mark antecedents, entity names).
std::vector<Token> tag_phrase(std::string_view phrase) {
  auto items = tokenize(phrase);
  std::erase_if(items, [](const Item& it) { return it.kind == ItemKind::Mark; });
  return tag_items(items, 0, items.size()).tokens;
}

std::string phrase_lemma(std::string_view phrase) {
  std::vector<std::string> lemmas;
  for (auto& t : tag_phrase(phrase)) lemmas.push_back(t.lemma);
  return join(lemmas, " ");
}

// ---------------------------------------------------------------------------
// Coreference

struct NounPhrase {
  std::size_t first;  // token indices, inclusive
  std::size_t last;
  bool plural;
};

bool token_plural(const Token& t) {
  if (t.pos != Pos::Noun) return false;
  return to_lower(t.surface) != t.lemma;
}

std::vector<NounPhrase> noun_phrases(const std::vector<Token>& tokens) {
  std::vector<NounPhrase> out;
  std::size_t t = 0;
  while (t < tokens.size()) {
    if (!is_nominal(tokens[t].pos)) {
      ++t;
      continue;
    }
    std::size_t e = t;
    while (e + 1 < tokens.size() && is_nominal(tokens[e + 1].pos)) ++e;
    out.push_back({t, e, token_plural(tokens[e])});
    t = e + 1;
  }
  return out;
}

struct SentenceWork {
  std::size_t first_item;
  std::size_t last_item;
  Tagged tagged;
  std::vector<CorefMark> marks;
  std::vector<std::size_t> inserted;  // marks created here (token indices)
};

std::string np_surface(std::string_view raw, const std::vector<Item>& items, const SentenceWork& s,
                       const NounPhrase& np) {
  auto b = items[s.tagged.item_index[np.first]].begin;
  auto e = items[s.tagged.item_index[np.last]].end;
  return std::string(raw.substr(b, e - b));
}

std::string np_lemma(const SentenceWork& s, const NounPhrase& np) {
  std::vector<std::string> parts;
  for (auto t = np.first; t <= np.last; ++t) parts.push_back(s.tagged.tokens[t].lemma);
  return join(parts, " ");
}

void resolve_pronouns(std::string_view raw, const std::vector<Item>& items,
                      std::vector<SentenceWork>& sentences) {
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    auto& s = sentences[si];
    auto& tokens = s.tagged.tokens;
    std::vector<bool> marked(tokens.size(), false);
    for (auto& m : s.marks) marked[m.token] = true;
    auto here = noun_phrases(tokens);
    std::vector<NounPhrase> before;
    if (si > 0) before = noun_phrases(sentences[si - 1].tagged.tokens);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].pos != Pos::Pronoun || marked[t]) continue;
      auto lower = to_lower(tokens[t].surface);
      if (!lex::is_third_person_pronoun(lower)) continue;
      const bool want_plural = lex::is_plural_pronoun(lower);
      auto agrees = [&](const NounPhrase& np) { return np.plural == want_plural; };
      const SentenceWork* src = nullptr;
      const NounPhrase* pick = nullptr;
      for (const auto& np : here) {
        if (np.last < t && agrees(np)) {
          src = &s;
          pick = &np;
          break;
        }
      }
      if (!pick) {
        for (const auto& np : before) {
          if (agrees(np)) {
            src = &sentences[si - 1];
            pick = &np;
            break;
          }
        }
      }
      if (!pick) continue;
      CorefMark m;
      m.pronoun = tokens[t].surface;
      m.token = t;
      m.antecedent = np_surface(raw, items, *src, *pick);
      m.antecedent_lemma = np_lemma(*src, *pick);
      s.marks.push_back(std::move(m));
      s.inserted.push_back(t);
    }
    std::sort(s.marks.begin(), s.marks.end(),
              [](const CorefMark& a, const CorefMark& b) { return a.token < b.token; });
  }
}

AnnotatedSentence render(std::string_view raw, const std::vector<Item>& items, const SentenceWork& s) {
  AnnotatedSentence out;
  out.tokens = s.tagged.tokens;
  out.marks = s.marks;
  const auto begin = items[s.first_item].begin;
  const auto end = items[s.last_item - 1].end;
  std::string surface;
  std::size_t cursor = begin;
  for (const auto& m : s.marks) {
    if (std::find(s.inserted.begin(), s.inserted.end(), m.token) == s.inserted.end()) continue;
    auto at = items[s.tagged.item_index[m.token]].end;
    surface.append(raw.substr(cursor, at - cursor));
    surface.append(" ");
    surface.append(format_mark(m.antecedent));
    cursor = at;
  }
  surface.append(raw.substr(cursor, end - cursor));
  // Internal newlines collapse to spaces; a sentence is one line.
  for (auto& c : surface) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  out.surface = surface;

  std::vector<std::string> lemmas;
  for (const auto& t : out.tokens) lemmas.push_back(t.lemma);
  for (const auto& m : out.marks) lemmas.push_back(format_mark(m.antecedent_lemma));
  out.lemma_form = join(lemmas, " ");
  return out;
}

}  // namespace

std::string_view pos_name(Pos pos) {
  switch (pos) {
    case Pos::Noun: return "NOUN";
    case Pos::PropNoun: return "PROPN";
    case Pos::Pronoun: return "PRON";
    case Pos::Verb: return "VERB";
    case Pos::Aux: return "AUX";
    case Pos::Adj: return "ADJ";
    case Pos::Adv: return "ADV";
    case Pos::Adp: return "ADP";
    case Pos::Det: return "DET";
    case Pos::CConj: return "CCONJ";
    case Pos::SConj: return "SCONJ";
    case Pos::Num: return "NUM";
    case Pos::Part: return "PART";
    case Pos::Punct: return "PUNCT";
    case Pos::Other: return "X";
  }
  return "X";
}

Pos parse_pos(std::string_view name) {
  for (auto p : {Pos::Noun, Pos::PropNoun, Pos::Pronoun, Pos::Verb, Pos::Aux, Pos::Adj, Pos::Adv, Pos::Adp,
                 Pos::Det, Pos::CConj, Pos::SConj, Pos::Num, Pos::Part, Pos::Punct}) {
    if (pos_name(p) == name) return p;
  }
  return Pos::Other;
}

std::vector<AnnotatedSentence> BuiltinAnnotator::annotate(std::string_view /*doc_id*/, std::string_view raw) {
  if (trim(raw).empty()) throw InvalidArgument("annotate: empty text");
  auto items = tokenize(raw);
  std::vector<SentenceWork> work;
  for (auto [first, last] : split_sentences(raw, items)) {
    SentenceWork s{first, last, tag_items(items, first, last), {}, {}};
    // Marks already present in the text attach to the token before them.
    std::size_t token = 0;
    bool seen_token = false;
    for (auto k = first; k < last; ++k) {
      if (items[k].kind != ItemKind::Mark) {
        seen_token = true;
        token =
            static_cast<std::size_t>(std::find(s.tagged.item_index.begin(), s.tagged.item_index.end(), k) -
                                     s.tagged.item_index.begin());
        continue;
      }
      if (!seen_token) continue;
      // A mark after the terminal refers back to the last word token.
      std::size_t anchor = token;
      while (anchor > 0 && s.tagged.tokens[anchor].pos == Pos::Punct) --anchor;
      s.marks.push_back(
          {s.tagged.tokens[anchor].surface, anchor, items[k].text, phrase_lemma(items[k].text)});
    }
    work.push_back(std::move(s));
  }
  resolve_pronouns(raw, items, work);
  std::vector<AnnotatedSentence> out;
  out.reserve(work.size());
  for (const auto& s : work) out.push_back(render(raw, items, s));
  return out;
}

std::vector<AnnotatedSentence> annotate(std::string_view raw) {
  BuiltinAnnotator a;
  return a.annotate("", raw);
}

std::string lemmatize_word(std::string_view word, Pos pos) {
  auto lower = to_lower(word);
  switch (pos) {
    case Pos::Noun: return noun_singular(lower);
    case Pos::Verb:
      if (auto b = known_verb_base(lower)) return *b;
      return guess_verb_base(lower);
    case Pos::Aux:
    case Pos::Pronoun:
    case Pos::Part:
      if (auto l = lex::closed_class_lemma(lower)) return std::string(*l);
      return lower;
    default: return lower;
  }
}

std::string canonical_concept(std::string_view phrase) {
  auto tokens = tag_phrase(phrase);
  std::size_t b = 0;
  std::size_t e = tokens.size();
  while (b < e && (tokens[b].pos == Pos::Punct || lex::is_determiner_like(to_lower(tokens[b].surface)))) {
    ++b;
  }
  while (e > b && tokens[e - 1].pos == Pos::Punct) --e;
  std::vector<std::string> lemmas;
  for (auto t = b; t < e; ++t) lemmas.push_back(tokens[t].lemma);
  auto out = normalize_lemma(join(lemmas, " "));
  if (out.empty()) out = normalize_lemma(phrase);
  return out;
}

std::vector<std::string> extract_noun_lemmas(std::string_view text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::unordered_set<std::string> seen;
  auto emit = [&](std::string lemma) {
    lemma = normalize_lemma(lemma);
    if (!lemma.empty() && seen.insert(lemma).second) out.push_back(std::move(lemma));
  };
  for (const auto& s : annotate(text)) {
    const auto& toks = s.tokens;
    std::size_t t = 0;
    while (t < toks.size()) {
      if (!is_nominal(toks[t].pos)) {
        ++t;
        continue;
      }
      emit(toks[t].lemma);
      if (toks[t].pos == Pos::PropNoun) {
        std::size_t e = t;
        while (e + 1 < toks.size() && toks[e + 1].pos == Pos::PropNoun) {
          ++e;
          emit(toks[e].lemma);
        }
        if (e > t) {
          std::vector<std::string> run;
          for (auto k = t; k <= e; ++k) run.push_back(toks[k].lemma);
          emit(join(run, " "));
        }
        t = e + 1;
      } else {
        ++t;
      }
    }
  }
  return out;
}

bool lemma_matches(const std::vector<std::string>& concept_tokens,
                   const std::vector<std::string>& sentence_tokens) {
  if (concept_tokens.empty() || concept_tokens.size() > sentence_tokens.size()) return false;
  auto it = std::search(sentence_tokens.begin(), sentence_tokens.end(), concept_tokens.begin(),
                        concept_tokens.end());
  return it != sentence_tokens.end();
}

bool lemma_matches(std::string_view concept_lemma, std::string_view sentence_lemma_form) {
  return lemma_matches(lemma_tokens(concept_lemma), lemma_tokens(sentence_lemma_form));
}

std::string format_mark(std::string_view antecedent) {
  std::string out = "[: ";
  out.append(antecedent);
  out.append(" ]");
  return out;
}

std::vector<std::string> mark_antecedents(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (auto end = mark_end_at(text, i)) {
      out.push_back(mark_content(text, i, *end));
      i = *end;
    } else {
      ++i;
    }
  }
  return out;
}

bool marks_balanced(std::string_view text) {
  std::size_t i = 0;
  while (true) {
    auto open = text.find("[:", i);
    if (open == std::string_view::npos) return true;
    auto close = text.find(']', open + 2);
    if (close == std::string_view::npos) return false;
    auto nested = text.find("[:", open + 2);
    if (nested != std::string_view::npos && nested < close) return false;
    i = close + 1;
  }
}

std::string strip_marks(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (auto end = mark_end_at(text, i)) {
      while (!out.empty() && out.back() == ' ') out.pop_back();
      i = *end;
      continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

}  // namespace lgm
