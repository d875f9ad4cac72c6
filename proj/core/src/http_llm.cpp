#include "lgm/http_llm.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "lgm/error.hpp"

namespace lgm {

namespace {

std::string env_or(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

}  // namespace

HttpChatClient::HttpChatClient(HttpChatConfig config) : config_(std::move(config)) {
  auto url = config_.base_url;
  if (url.empty()) throw InvalidArgument("LLM base URL is not set (LGM_BASE_URL)");
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidArgument("LLM base URL needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.rfind("https://", 0) == 0) throw InvalidArgument("this build has no TLS support for " + url);
#endif
}

HttpChatConfig HttpChatClient::config_from_env() {
  HttpChatConfig c;
  c.base_url = env_or("LGM_BASE_URL");
  c.api_key = env_or("LGM_API_KEY");
  c.model = env_or("LGM_MODEL", "gpt-4o-mini");
  return c;
}

std::string HttpChatClient::chat(const std::vector<ChatMessage>& messages, const ChatParams& params) {
  validate_transcript(messages);
  auto digest = transcript_digest(messages);

  nlohmann::json body;
  body["model"] = params.model.empty() ? config_.model : params.model;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  for (const auto& m : messages)
    body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
  auto payload = body.dump();

  httplib::Client client(origin_);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(params.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(params.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_failure;
  auto delay = config_.backoff;
  for (int attempt = 0; attempt <= std::max(0, params.retries); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw LlmError("chat request " + digest + " failed with HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 300),
                     digest);
    }
    try {
      auto doc = nlohmann::json::parse(res->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ResponseParseError("chat response for " + digest + " has no assistant content: " + e.what(),
                               res->body);
    }
  }
  throw LlmError("chat request " + digest + " gave up after " + std::to_string(params.retries) +
                     " retries: " + last_failure,
                 digest);
}

}  // namespace lgm
