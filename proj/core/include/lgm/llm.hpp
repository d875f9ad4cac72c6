#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace lgm {

enum class Role { System, User, Assistant };
std::string_view to_string(Role role);
/// Throws InvalidArgument for anything but system/user/assistant.
Role parse_role(std::string_view name);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatParams {
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::chrono::milliseconds timeout{120000};
  int retries = 3;
};

/// Stable 16-hex-digit FNV-1a digest of a transcript (roles and contents).
/// Identifies a request in scripts and trace records.
std::string transcript_digest(const std::vector<ChatMessage>& messages);

/// Throws InvalidArgument unless the transcript is non-empty and ends with a
/// user turn.
void validate_transcript(const std::vector<ChatMessage>& messages);

/// Implementations must be safe for concurrent calls.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the assistant text. Throws LlmError on transport failure.
  virtual std::string chat(const std::vector<ChatMessage>& messages, const ChatParams& params) = 0;
};

}  // namespace lgm
