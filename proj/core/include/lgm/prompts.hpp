#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lgm/llm.hpp"

namespace lgm {

using PromptVars = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
  std::string id;
  std::string description;
  std::vector<std::string> placeholders;
  std::vector<ChatMessage> messages;
};

/// Parses one prompt asset (see docs/prompt_catalog.md). Throws FormatError.
PromptTemplate parse_prompt_template(std::string_view json_text);

/// Substitutes `{name}` for every declared placeholder and leaves all other
/// text untouched, including literal JSON braces in few-shot examples.
/// Throws InvalidArgument when a declared placeholder has no value.
std::vector<ChatMessage> render_prompt(const PromptTemplate& tmpl, const PromptVars& vars);

class PromptCatalog {
 public:
  /// The templates compiled into the library.
  static const PromptCatalog& builtin();
  /// Built-in templates overlaid with every `<id>.json` found in `dir`.
  static PromptCatalog with_overrides(const std::filesystem::path& dir);

  /// Throws NotFound for unknown ids.
  const PromptTemplate& get(std::string_view id) const;
  std::vector<ChatMessage> render(std::string_view id, const PromptVars& vars) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace lgm
