#pragma once

#include <chrono>
#include <string>

#include "lgm/llm.hpp"

namespace lgm {

struct HttpChatConfig {
  /// e.g. "https://api.openai.com/v1"; "/chat/completions" is appended.
  std::string base_url;
  std::string api_key;
  std::string model;
  std::chrono::milliseconds backoff{500};  // first retry delay, doubled each time
};

/// Chat-completions client over HTTP(S) with bearer auth. Retries transport
/// failures, 429 and 5xx with exponential backoff; other HTTP errors and
/// undecodable bodies fail immediately.
class HttpChatClient : public ChatClient {
 public:
  /// Throws InvalidArgument for a missing or scheme-less base URL.
  explicit HttpChatClient(HttpChatConfig config);
  /// Reads LGM_BASE_URL, LGM_API_KEY and LGM_MODEL (default gpt-4o-mini).
  static HttpChatConfig config_from_env();

  std::string chat(const std::vector<ChatMessage>& messages, const ChatParams& params) override;

  const HttpChatConfig& config() const { return config_; }

 private:
  HttpChatConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace lgm
