#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "lgm/llm.hpp"

namespace lgm::test {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(LGM_FIXTURE_DIR) / rel;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Chat client backed by a function; records every transcript it sees.
class FnChat : public ChatClient {
 public:
  using Fn = std::function<std::string(const std::vector<ChatMessage>&)>;
  explicit FnChat(Fn fn) : fn_(std::move(fn)) {}
  std::string chat(const std::vector<ChatMessage>& messages, const ChatParams&) override {
    {
      std::lock_guard lock(mu_);
      seen_.push_back(messages);
    }
    return fn_(messages);
  }
  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return seen_.size();
  }
  std::vector<std::vector<ChatMessage>> seen() const {
    std::lock_guard lock(mu_);
    return seen_;
  }

 private:
  Fn fn_;
  mutable std::mutex mu_;
  std::vector<std::vector<ChatMessage>> seen_;
};

inline const std::string& last_user(const std::vector<ChatMessage>& m) {
  for (auto it = m.rbegin(); it != m.rend(); ++it)
    if (it->role == Role::User) return it->content;
  static const std::string none;
  return none;
}

inline bool system_has(const std::vector<ChatMessage>& m, std::string_view needle) {
  return !m.empty() && m.front().role == Role::System && m.front().content.find(needle) != std::string::npos;
}

inline constexpr std::string_view kSysInheritance = "inheritance or category";
inline constexpr std::string_view kSysComposition = "composition relationships";
inline constexpr std::string_view kSysAlias = "alias/name/equivalence";
inline constexpr std::string_view kSysMark = "cite it in response";
inline constexpr std::string_view kSysAnswer = "combining local knowledge base";

}  // namespace lgm::test
