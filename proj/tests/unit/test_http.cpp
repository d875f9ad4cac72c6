#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "lgm/error.hpp"
#include "lgm/http_llm.hpp"

using namespace lgm;

namespace {

/// Local chat-completions stub. `plan` decides each response by call number.
class Stub {
 public:
  using Plan = std::function<void(int call, const httplib::Request&, httplib::Response&)>;
  explicit Stub(Plan plan) : plan_(std::move(plan)) {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) { plan_(calls_++, req, res); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Stub() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int calls() const { return calls_; }

 private:
  Plan plan_;
  httplib::Server server_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  std::thread thread_;
};

void reply(httplib::Response& res, const std::string& content) {
  nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
  res.set_content(body.dump(), "application/json");
}

HttpChatClient client_for(const Stub& stub) {
  return HttpChatClient({stub.base_url(), "sk-test", "stub-model", std::chrono::milliseconds(1)});
}

const std::vector<ChatMessage> kHello = {{Role::System, "s"}, {Role::User, "hello"}};

}  // namespace

TEST_SUITE("http") {
  TEST_CASE("returns the assistant content and sends the expected request") {
    nlohmann::json seen;
    std::string auth;
    Stub stub([&](int, const httplib::Request& req, httplib::Response& res) {
      seen = nlohmann::json::parse(req.body);
      auth = req.get_header_value("Authorization");
      reply(res, "canned answer");
    });
    auto c = client_for(stub);
    ChatParams p;
    p.temperature = 0.25;
    CHECK(c.chat(kHello, p) == "canned answer");
    CHECK(auth == "Bearer sk-test");
    CHECK(seen["model"] == "stub-model");
    CHECK(seen["temperature"] == 0.25);
    CHECK(seen["messages"][1]["role"] == "user");
    CHECK(seen["messages"][1]["content"] == "hello");
  }

  TEST_CASE("retries 5xx and 429, then succeeds") {
    Stub stub([](int call, const httplib::Request&, httplib::Response& res) {
      if (call == 0)
        res.status = 503;
      else if (call == 1)
        res.status = 429;
      else
        reply(res, "finally");
    });
    auto c = client_for(stub);
    CHECK(c.chat(kHello, {}) == "finally");
    CHECK(stub.calls() == 3);
  }

  TEST_CASE("gives up after the retry budget") {
    Stub stub([](int, const httplib::Request&, httplib::Response& res) { res.status = 500; });
    auto c = client_for(stub);
    ChatParams p;
    p.retries = 2;
    CHECK_THROWS_AS(c.chat(kHello, p), LlmError);
    CHECK(stub.calls() == 3);
  }

  TEST_CASE("client errors fail immediately") {
    Stub stub([](int, const httplib::Request&, httplib::Response& res) {
      res.status = 401;
      res.set_content("{\"error\":\"bad key\"}", "application/json");
    });
    auto c = client_for(stub);
    CHECK_THROWS_AS(c.chat(kHello, {}), LlmError);
    CHECK(stub.calls() == 1);
  }

  TEST_CASE("undecodable bodies") {
    Stub stub([](int, const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"choices\":[]}", "application/json");
    });
    auto c = client_for(stub);
    CHECK_THROWS_AS(c.chat(kHello, {}), ResponseParseError);
  }

  TEST_CASE("configuration") {
    CHECK_THROWS_AS(HttpChatClient({"", "", "m"}), InvalidArgument);
    CHECK_THROWS_AS(HttpChatClient({"localhost:8080", "", "m"}), InvalidArgument);
    CHECK_NOTHROW(HttpChatClient({"http://localhost:8080/v1/", "", "m"}));
  }

  TEST_CASE("unreachable endpoint is a transport error") {
    // Bind and release a port so nothing listens on it.
    int port;
    {
      httplib::Server s;
      port = s.bind_to_any_port("127.0.0.1");
    }
    HttpChatClient c({"http://127.0.0.1:" + std::to_string(port), "", "m", std::chrono::milliseconds(1)});
    ChatParams p;
    p.retries = 1;
    p.timeout = std::chrono::milliseconds(500);
    CHECK_THROWS_AS(c.chat(kHello, p), LlmError);
  }
}
