#include "lgm/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lgm/error.hpp"

namespace lgm {

namespace detail {
const std::map<std::string, std::string_view>& embedded_prompt_assets();
}

PromptTemplate parse_prompt_template(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("prompt asset is not valid JSON: ") + e.what(), e.byte);
  }
  PromptTemplate t;
  try {
    t.id = doc.at("id").get<std::string>();
    t.description = doc.value("description", std::string{});
    t.placeholders = doc.at("placeholders").get<std::vector<std::string>>();
    for (const auto& m : doc.at("messages")) {
      t.messages.push_back({parse_role(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("prompt asset is malformed: ") + e.what(), 0);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("prompt asset is malformed: ") + e.what(), 0);
  }
  if (t.messages.empty()) throw FormatError("prompt asset '" + t.id + "' has no messages", 0);
  for (const auto& p : t.placeholders) {
    auto site = "{" + p + "}";
    bool used = std::any_of(t.messages.begin(), t.messages.end(),
                            [&](const ChatMessage& m) { return m.content.find(site) != std::string::npos; });
    if (!used) throw FormatError("prompt asset '" + t.id + "' declares unused placeholder " + site, 0);
  }
  return t;
}

std::vector<ChatMessage> render_prompt(const PromptTemplate& tmpl, const PromptVars& vars) {
  for (const auto& p : tmpl.placeholders) {
    if (!vars.contains(p)) {
      throw InvalidArgument("prompt '" + tmpl.id + "': placeholder {" + p + "} is unbound");
    }
  }
  auto out = tmpl.messages;
  for (auto& m : out) {
    std::string text;
    text.reserve(m.content.size());
    const auto& src = m.content;
    std::size_t i = 0;
    while (i < src.size()) {
      if (src[i] == '{') {
        auto close = src.find('}', i + 1);
        if (close != std::string::npos) {
          std::string_view name(src.data() + i + 1, close - i - 1);
          if (std::find(tmpl.placeholders.begin(), tmpl.placeholders.end(), name) !=
              tmpl.placeholders.end()) {
            text += vars.find(name)->second;
            i = close + 1;
            continue;
          }
        }
      }
      text.push_back(src[i++]);
    }
    m.content = std::move(text);
  }
  return out;
}

const PromptCatalog& PromptCatalog::builtin() {
  static const PromptCatalog catalog = [] {
    PromptCatalog c;
    for (const auto& [id, body] : detail::embedded_prompt_assets()) {
      c.templates_.emplace(id, parse_prompt_template(body));
    }
    return c;
  }();
  return catalog;
}

PromptCatalog PromptCatalog::with_overrides(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw NotFound("prompt directory not found: " + dir.string());
  PromptCatalog c = builtin();
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto t = parse_prompt_template(buf.str());
    if (t.id != entry.path().stem().string()) {
      throw FormatError("prompt file " + entry.path().string() + " declares id '" + t.id + "'", 0);
    }
    c.templates_.insert_or_assign(t.id, std::move(t));
  }
  return c;
}

const PromptTemplate& PromptCatalog::get(std::string_view id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw NotFound("unknown prompt template: " + std::string(id));
  return it->second;
}

std::vector<ChatMessage> PromptCatalog::render(std::string_view id, const PromptVars& vars) const {
  return render_prompt(get(id), vars);
}

std::vector<std::string> PromptCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

}  // namespace lgm
