#include "lgm/scripted_llm.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lgm/error.hpp"

namespace lgm {

using nlohmann::ordered_json;

ScriptedChatClient::ScriptedChatClient(std::vector<ScriptEntry> entries)
    : entries_(std::move(entries)), used_(entries_.size(), 0) {
  std::set<std::string> digests;
  for (const auto& e : entries_) {
    if (e.digest.has_value() == e.contains.has_value()) {
      throw InvalidArgument("script entry needs exactly one of digest / contains");
    }
    if (e.digest && !digests.insert(*e.digest).second) {
      throw InvalidArgument("script has two entries for digest " + *e.digest);
    }
    if (e.max_uses && *e.max_uses < 0) throw InvalidArgument("script entry max_uses must be >= 0");
  }
}

std::vector<ScriptEntry> ScriptedChatClient::parse_script(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("script is not valid JSON: ") + e.what(), e.byte);
  }
  std::vector<ScriptEntry> out;
  try {
    // A bare array is shorthand for version 1.
    if (doc.is_object()) {
      const auto& version = doc.at("version");
      if (!version.is_number_integer() || version.get<int>() != 1)
        throw FormatError("script: unsupported version " + version.dump(), 0);
    }
    const auto& list = doc.is_array() ? doc : doc.at("entries");
    if (!list.is_array()) throw FormatError("script: \"entries\" must be an array", 0);
    for (const auto& rec : list) {
      ScriptEntry e;
      if (rec.contains("digest")) e.digest = rec["digest"].get<std::string>();
      if (rec.contains("contains")) e.contains = rec["contains"].get<std::string>();
      if (rec.contains("system_contains")) e.system_contains = rec["system_contains"].get<std::string>();
      if (!e.digest && !e.contains)
        throw FormatError("script entry " + std::to_string(out.size()) + " has neither digest nor contains",
                          0);
      const auto& resp = rec.at("response");
      // Structured replies may be written inline as JSON instead of a quoted string.
      e.response = resp.is_string() ? resp.get<std::string>() : resp.dump();
      if (rec.contains("max_uses")) e.max_uses = rec["max_uses"].get<int>();
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("script entry is malformed: ") + e.what(), 0);
  }
  return out;
}

ScriptedChatClient ScriptedChatClient::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("script file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ScriptedChatClient(parse_script(buf.str()));
  } catch (const InvalidArgument& e) {
    throw FormatError(path.string() + ": " + e.what(), 0);
  }
}

std::string ScriptedChatClient::chat(const std::vector<ChatMessage>& messages, const ChatParams&) {
  validate_transcript(messages);
  auto digest = transcript_digest(messages);
  const auto& last_user = messages.back().content;
  const std::string* system = nullptr;
  if (messages.front().role == Role::System) system = &messages.front().content;

  std::lock_guard lock(mu_);
  ++calls_;
  auto available = [&](std::size_t i) { return !entries_[i].max_uses || used_[i] < *entries_[i].max_uses; };
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].digest && *entries_[i].digest == digest && available(i)) {
      ++used_[i];
      return entries_[i].response;
    }
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!e.contains || !available(i)) continue;
    if (last_user.find(*e.contains) == std::string::npos) continue;
    if (e.system_contains && (!system || system->find(*e.system_contains) == std::string::npos)) continue;
    ++used_[i];
    return e.response;
  }
  throw LlmError("no script entry matches request " + digest, digest);
}

std::size_t ScriptedChatClient::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

int ScriptedChatClient::uses(std::size_t i) const {
  std::lock_guard lock(mu_);
  return used_.at(i);
}

RecordingChatClient::RecordingChatClient(std::shared_ptr<ChatClient> inner) : inner_(std::move(inner)) {
  if (!inner_) throw InvalidArgument("RecordingChatClient needs an inner client");
}

std::string RecordingChatClient::chat(const std::vector<ChatMessage>& messages, const ChatParams& params) {
  auto response = inner_->chat(messages, params);
  std::lock_guard lock(mu_);
  log_.push_back({transcript_digest(messages), messages, response});
  return response;
}

std::vector<RecordedExchange> RecordingChatClient::exchanges() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::string RecordingChatClient::to_script() const {
  std::lock_guard lock(mu_);
  ordered_json entries = ordered_json::array();
  std::set<std::string> seen;
  for (const auto& x : log_) {
    if (!seen.insert(x.digest).second) continue;
    entries.push_back(
        {{"digest", x.digest}, {"note", x.messages.back().content.substr(0, 120)}, {"response", x.response}});
  }
  return ordered_json{{"version", 1}, {"entries", entries}}.dump(2) + "\n";
}

void RecordingChatClient::save_script(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write script file " + path.string());
  out << to_script();
}

}  // namespace lgm
