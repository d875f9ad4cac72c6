#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lgm/graph.hpp"

namespace lgm {

inline constexpr int kGraphFormatVersion = 1;

/// Graph file: one JSON document, see docs/graph_format.md.
std::string serialize_graph(const LanguageGraph& graph);

/// Throws FormatError (with byte offset for syntax errors) for corrupt input
/// and UnsupportedVersion for any version other than kGraphFormatVersion.
LanguageGraph deserialize_graph(std::string_view text);

/// Writes through a temporary file and renames, so a crash never leaves a
/// truncated graph behind.
void save_graph(const LanguageGraph& graph, const std::filesystem::path& path);
LanguageGraph load_graph(const std::filesystem::path& path);

/// Property-graph CREATE/MATCH statements covering every node and edge.
std::string export_cypher(const LanguageGraph& graph);

}  // namespace lgm
