#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lgm/llm.hpp"

namespace lgm {

/// One canned reply. Exactly one of `digest` / `contains` is set.
/// `contains` is matched against the last user message; `system_contains`
/// additionally filters on the first system message when present.
struct ScriptEntry {
  std::optional<std::string> digest;
  std::optional<std::string> contains;
  std::optional<std::string> system_contains;
  std::string response;
  std::optional<int> max_uses;
};

/// Offline, deterministic ChatClient. Digest entries are consulted first,
/// then substring entries in declaration order; exhausted entries are
/// skipped. A request nothing matches raises LlmError carrying its digest.
class ScriptedChatClient : public ChatClient {
 public:
  explicit ScriptedChatClient(std::vector<ScriptEntry> entries);
  /// Reads a script file (docs/script_format.md). Throws FormatError.
  static ScriptedChatClient from_file(const std::filesystem::path& path);
  static std::vector<ScriptEntry> parse_script(std::string_view json_text);

  std::string chat(const std::vector<ChatMessage>& messages, const ChatParams& params) override;

  std::size_t calls() const;
  /// How many times entry `i` has answered.
  int uses(std::size_t i) const;

 private:
  std::vector<ScriptEntry> entries_;
  std::vector<int> used_;
  std::size_t calls_ = 0;
  mutable std::mutex mu_;
};

struct RecordedExchange {
  std::string digest;
  std::vector<ChatMessage> messages;
  std::string response;
};

/// Passes calls through to another client and keeps every exchange, so a
/// live session can be saved as a replayable script.
class RecordingChatClient : public ChatClient {
 public:
  explicit RecordingChatClient(std::shared_ptr<ChatClient> inner);

  std::string chat(const std::vector<ChatMessage>& messages, const ChatParams& params) override;

  std::vector<RecordedExchange> exchanges() const;
  /// Digest-keyed script in the same format `ScriptedChatClient` reads.
  std::string to_script() const;
  void save_script(const std::filesystem::path& path) const;

 private:
  std::shared_ptr<ChatClient> inner_;
  std::vector<RecordedExchange> log_;
  mutable std::mutex mu_;
};

}  // namespace lgm
