#include "lgm/llm.hpp"

#include <cstdint>
#include <cstdio>

#include "lgm/error.hpp"

namespace lgm {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

Role parse_role(std::string_view name) {
  if (name == "system") return Role::System;
  if (name == "user") return Role::User;
  if (name == "assistant") return Role::Assistant;
  throw InvalidArgument("unknown chat role: " + std::string(name));
}

std::string transcript_digest(const std::vector<ChatMessage>& messages) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& m : messages) {
    feed(to_string(m.role));
    feed(std::string_view("\0", 1));
    feed(m.content);
    feed("\x1e");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_transcript(const std::vector<ChatMessage>& messages) {
  if (messages.empty()) throw InvalidArgument("chat: empty transcript");
  if (messages.back().role != Role::User)
    throw InvalidArgument("chat: transcript must end with a user message");
}

}  // namespace lgm
