#include "lgm/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lgm/error.hpp"

namespace lgm {

using nlohmann::ordered_json;

class GraphCodec {
 public:
  static ordered_json encode(const LanguageGraph& g) {
    ordered_json doc;
    doc["format"] = "lgm-language-graph";
    doc["version"] = kGraphFormatVersion;
    doc["metadata"] = {{"created", g.metadata_.created}, {"sources", g.metadata_.sources}};
    auto& sections = doc["sections"] = ordered_json::array();
    for (const auto& s : g.sections_) {
      ordered_json parent = nullptr;
      if (s.parent) parent = s.parent->value;
      sections.push_back({{"id", s.id.value}, {"title", s.title}, {"parent", parent}, {"order", s.order}});
    }
    auto& sentences = doc["sentences"] = ordered_json::array();
    for (const auto& s : g.sentences_) {
      sentences.push_back({{"id", s.id.value},
                           {"section", s.section.value},
                           {"index", s.index},
                           {"sentence", s.sentence},
                           {"sentence_lemma", s.sentence_lemma}});
    }
    auto& concepts = doc["concepts"] = ordered_json::array();
    for (const auto& c : g.concepts_) concepts.push_back({{"id", c.id.value}, {"lemma", c.lemma}});
    auto& edges = doc["meta_edges"] = ordered_json::array();
    for (const auto& e : g.edges_) {
      auto evidence = ordered_json::array();
      for (auto s : e.evidence) evidence.push_back(s.value);
      edges.push_back({{"kind", to_string(e.kind)},
                       {"from", e.from.value},
                       {"to", e.to.value},
                       {"evidence", evidence},
                       {"status", to_string(e.status)}});
    }
    auto& mentions = doc["mentions"] = ordered_json::array();
    for (const auto& m : g.mentions_) {
      mentions.push_back(ordered_json::array({m.concept_id.value, m.sentence.value}));
    }
    return doc;
  }

  static LanguageGraph decode(const ordered_json& doc) {
    if (!doc.is_object()) throw FormatError("graph file: top level is not an object", 0);
    if (doc.value("format", std::string{}) != "lgm-language-graph") {
      throw FormatError("graph file: missing or wrong \"format\" tag", 0);
    }
    const auto& version = doc.at("version");
    if (!version.is_number_integer() || version.get<int>() != kGraphFormatVersion) {
      int v = version.is_number_integer() ? version.get<int>() : -1;
      throw UnsupportedVersion("graph file: unsupported format version " + version.dump(), v);
    }

    LanguageGraph g;
    const auto& meta = doc.at("metadata");
    g.metadata_.format_version = kGraphFormatVersion;
    g.metadata_.created = meta.at("created").get<std::string>();
    g.metadata_.sources = meta.at("sources").get<std::vector<std::string>>();

    auto expect_id = [](const ordered_json& rec, std::size_t pos, const char* table) {
      auto id = rec.at("id").get<std::uint32_t>();
      if (id != pos) {
        throw FormatError(std::string("graph file: ") + table + "[" + std::to_string(pos) + "] has id " +
                              std::to_string(id),
                          0);
      }
    };

    const auto& sections = doc.at("sections");
    for (std::size_t i = 0; i < sections.size(); ++i) {
      const auto& rec = sections[i];
      expect_id(rec, i, "sections");
      std::optional<SectionId> parent;
      if (!rec.at("parent").is_null()) {
        auto p = rec.at("parent").get<std::uint32_t>();
        if (p >= i)
          throw FormatError(
              "graph file: sections[" + std::to_string(i) + "] parent is not an earlier section", 0);
        parent = SectionId{p};
        g.section_child_count_[p]++;
      }
      g.sections_.push_back({SectionId{static_cast<std::uint32_t>(i)}, rec.at("title").get<std::string>(),
                             parent, rec.at("order").get<int>()});
      g.section_child_count_.push_back(0);
      g.section_sentence_count_.push_back(0);
    }

    const auto& sentences = doc.at("sentences");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      const auto& rec = sentences[i];
      expect_id(rec, i, "sentences");
      auto section = rec.at("section").get<std::uint32_t>();
      if (section >= g.sections_.size()) {
        throw FormatError("graph file: sentences[" + std::to_string(i) + "] references unknown section", 0);
      }
      g.sentences_.push_back({SentenceId{static_cast<std::uint32_t>(i)}, SectionId{section},
                              rec.at("index").get<int>(), rec.at("sentence").get<std::string>(),
                              rec.at("sentence_lemma").get<std::string>()});
      g.section_sentence_count_[section] =
          std::max(g.section_sentence_count_[section], g.sentences_.back().index + 1);
      g.index_sentence(SentenceId{static_cast<std::uint32_t>(i)});
    }

    const auto& concepts = doc.at("concepts");
    if (concepts.empty() || concepts[0].at("lemma").get<std::string>() != kRootLemma) {
      throw FormatError("graph file: concepts[0] must be the root 'thing'", 0);
    }
    for (std::size_t i = 1; i < concepts.size(); ++i) {
      const auto& rec = concepts[i];
      expect_id(rec, i, "concepts");
      auto lemma = rec.at("lemma").get<std::string>();
      if (lemma.empty() || g.concept_by_lemma_.contains(lemma)) {
        throw FormatError("graph file: concepts[" + std::to_string(i) + "] has an empty or duplicate lemma",
                          0);
      }
      g.create_concept(std::move(lemma));
    }

    const auto& edges = doc.at("meta_edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& rec = edges[i];
      auto where = "graph file: meta_edges[" + std::to_string(i) + "] ";
      auto kind = parse_relation_kind(rec.at("kind").get<std::string>());
      auto status = parse_relation_status(rec.at("status").get<std::string>());
      auto from = rec.at("from").get<std::uint32_t>();
      auto to = rec.at("to").get<std::uint32_t>();
      if (from >= g.concepts_.size() || to >= g.concepts_.size())
        throw FormatError(where + "endpoint out of range", 0);
      if (from == to) throw FormatError(where + "is a self-loop", 0);
      if (status == RelationStatus::Invalid) throw FormatError(where + "has status invalid", 0);
      std::vector<SentenceId> evidence;
      for (const auto& s : rec.at("evidence")) {
        auto sid = s.get<std::uint32_t>();
        if (sid >= g.sentences_.size()) throw FormatError(where + "evidence out of range", 0);
        evidence.push_back(SentenceId{sid});
      }
      LanguageGraph::EdgeKey key{kind, from, to};
      if (g.edge_by_key_.contains(key) ||
          (kind == RelationKind::Alias && g.edge_by_key_.contains({kind, to, from}))) {
        throw FormatError(where + "duplicates an earlier edge", 0);
      }
      if (kind == RelationKind::Inheritance && g.inheritance_reaches(ConceptId{to}, ConceptId{from})) {
        throw FormatError(where + "closes an inheritance cycle", 0);
      }
      EdgeId id{static_cast<std::uint32_t>(g.edges_.size())};
      g.edges_.push_back({kind, ConceptId{from}, ConceptId{to}, std::move(evidence), status});
      g.edge_by_key_.emplace(key, id);
      g.out_edges_[from].push_back(id);
      g.in_edges_[to].push_back(id);
    }

    const auto& mentions = doc.at("mentions");
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      auto c = mentions[i].at(0).get<std::uint32_t>();
      auto s = mentions[i].at(1).get<std::uint32_t>();
      if (c >= g.concepts_.size() || s >= g.sentences_.size()) {
        throw FormatError("graph file: mentions[" + std::to_string(i) + "] endpoint out of range", 0);
      }
      g.link_mention(ConceptId{c}, SentenceId{s});
    }
    return g;
  }
};

std::string serialize_graph(const LanguageGraph& graph) {
  return GraphCodec::encode(graph).dump(1) + "\n";
}

LanguageGraph deserialize_graph(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    auto pos = std::min<std::size_t>(e.byte, text.size());
    throw FormatError("graph file is corrupt at byte " + std::to_string(pos) + ": " + e.what(), pos);
  }
  try {
    return GraphCodec::decode(doc);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("graph file has an invalid record: ") + e.what(), 0);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("graph file has an invalid record: ") + e.what(), 0);
  }
}

void save_graph(const LanguageGraph& graph, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write graph file " + tmp.string());
    out << serialize_graph(graph);
    if (!out.flush()) throw Error("cannot write graph file " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move graph file into place at " + path.string() + ": " + ec.message());
}

LanguageGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("graph file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_graph(buf.str());
}

namespace {

std::string cypher_string(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string export_cypher(const LanguageGraph& g) {
  std::ostringstream out;
  out << "// lgm language graph export, format version " << kGraphFormatVersion << "\n";
  for (const auto& s : g.sections()) {
    out << "CREATE (:Section {id: " << s.id.value << ", title: " << cypher_string(s.title)
        << ", order: " << s.order << "});\n";
  }
  for (const auto& s : g.sentences()) {
    out << "CREATE (:Sentence {id: " << s.id.value << ", index: " << s.index
        << ", sentence: " << cypher_string(s.sentence)
        << ", sentenceLemma: " << cypher_string(s.sentence_lemma) << "});\n";
  }
  for (const auto& c : g.concepts()) {
    out << "CREATE (:Concept {id: " << c.id.value << ", lemma: " << cypher_string(c.lemma) << "});\n";
  }
  for (const auto& s : g.sections()) {
    if (!s.parent) continue;
    out << "MATCH (a:Section {id: " << s.parent->value << "}), (b:Section {id: " << s.id.value
        << "}) CREATE (a)-[:HAS_SECTION]->(b);\n";
  }
  for (const auto& s : g.sentences()) {
    out << "MATCH (a:Section {id: " << s.section.value << "}), (b:Sentence {id: " << s.id.value
        << "}) CREATE (a)-[:HAS_SENTENCE]->(b);\n";
  }
  for (const auto& e : g.meta_edges()) {
    out << "MATCH (a:Concept {id: " << e.from.value << "}), (b:Concept {id: " << e.to.value
        << "}) CREATE (a)-[:" << upper(to_string(e.kind))
        << " {status: " << cypher_string(to_string(e.status)) << ", evidence: [";
    for (std::size_t i = 0; i < e.evidence.size(); ++i) out << (i ? ", " : "") << e.evidence[i].value;
    out << "]}]->(b);\n";
  }
  for (const auto& m : g.mention_edges()) {
    out << "MATCH (a:Concept {id: " << m.concept_id.value << "}), (b:Sentence {id: " << m.sentence.value
        << "}) CREATE (a)-[:MENTIONED_IN]->(b);\n";
  }
  return out.str();
}

}  // namespace lgm
