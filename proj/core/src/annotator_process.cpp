#include "lgm/annotator_process.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lgm/error.hpp"
#include "lgm/text.hpp"

namespace lgm {

using nlohmann::json;

namespace {

AnnotatedSentence sentence_from_json(const json& rec) {
  AnnotatedSentence s;
  s.surface = rec.at("surface").get<std::string>();
  s.lemma_form = rec.at("lemma_form").get<std::string>();
  if (rec.contains("tokens")) {
    for (const auto& t : rec["tokens"]) {
      s.tokens.push_back({t.at("surface").get<std::string>(), t.at("lemma").get<std::string>(),
                          parse_pos(t.value("pos", std::string("X")))});
    }
  }
  if (rec.contains("marks")) {
    for (const auto& m : rec["marks"]) {
      s.marks.push_back({m.value("pronoun", std::string{}), m.value("token", std::size_t{0}),
                         m.at("antecedent").get<std::string>(), m.value("antecedent_lemma", std::string{})});
    }
  }
  return s;
}

}  // namespace

std::vector<AnnotatedSentence> parse_annotated_sentences(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("annotation is not valid JSON: ") + e.what(), e.byte);
  }
  std::vector<AnnotatedSentence> out;
  try {
    const auto& list = doc.at("sentences");
    for (std::size_t i = 0; i < list.size(); ++i) {
      auto s = sentence_from_json(list[i]);
      if (trim(s.surface).empty() || trim(s.lemma_form).empty()) {
        throw FormatError("annotation sentence " + std::to_string(i) + " is empty", 0);
      }
      if (!marks_balanced(s.surface) || !marks_balanced(s.lemma_form)) {
        throw FormatError("annotation sentence " + std::to_string(i) + " has an unclosed mark", 0);
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("annotation is malformed: ") + e.what(), 0);
  }
  return out;
}

std::string annotated_sentences_to_json(const std::vector<AnnotatedSentence>& sentences) {
  json list = json::array();
  for (const auto& s : sentences) {
    json tokens = json::array();
    for (const auto& t : s.tokens) {
      tokens.push_back({{"surface", t.surface}, {"lemma", t.lemma}, {"pos", pos_name(t.pos)}});
    }
    json marks = json::array();
    for (const auto& m : s.marks) {
      marks.push_back({{"pronoun", m.pronoun},
                       {"token", m.token},
                       {"antecedent", m.antecedent},
                       {"antecedent_lemma", m.antecedent_lemma}});
    }
    list.push_back(
        {{"surface", s.surface}, {"lemma_form", s.lemma_form}, {"tokens", tokens}, {"marks", marks}});
  }
  return json{{"sentences", list}}.dump();
}

std::vector<AnnotatedSentence> load_preannotated(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("pre-annotated file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_annotated_sentences(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.position());
  }
}

std::string annotation_request(std::string_view doc_id, std::string_view text) {
  return json{{"doc_id", std::string(doc_id)}, {"text", std::string(text)}}.dump();
}

ProcessAnnotator::ProcessAnnotator(std::vector<std::string> argv, std::chrono::milliseconds timeout)
    : argv_(std::move(argv)), timeout_(timeout) {
  if (argv_.empty()) throw InvalidArgument("annotator command is empty");
  int sv[2];
  // A socket rather than pipes so writes to a dead child fail with EPIPE
  // (MSG_NOSIGNAL) instead of killing us with SIGPIPE.
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw AnnotatorError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw AnnotatorError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(sv[1]);
  fd_ = sv[0];
  pid_ = pid;
}

ProcessAnnotator::~ProcessAnnotator() {
  shutdown();
}

void ProcessAnnotator::shutdown() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    // Closing the socket is the polite stop signal; give it a moment.
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      ::usleep(10000);
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string ProcessAnnotator::read_line() {
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      auto line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0)
      throw AnnotatorError("annotator did not answer within " + std::to_string(timeout_.count()) + " ms");
    pollfd p{fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(left.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc < 0) throw AnnotatorError(std::string("poll failed: ") + std::strerror(errno));
    if (rc == 0) continue;
    char chunk[8192];
    auto n = ::read(fd_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw AnnotatorError("annotator process exited (command: " + argv_.front() + ")");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<AnnotatedSentence> ProcessAnnotator::annotate(std::string_view doc_id, std::string_view raw) {
  if (trim(raw).empty()) throw InvalidArgument("annotate: empty text");
  std::lock_guard lock(mu_);
  if (fd_ < 0) throw AnnotatorError("annotator process is not running");
  auto request = annotation_request(doc_id, raw) + "\n";
  std::size_t sent = 0;
  while (sent < request.size()) {
    auto n = ::send(fd_, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw AnnotatorError(std::string("cannot write to annotator: ") + std::strerror(errno));
    sent += static_cast<std::size_t>(n);
  }
  auto line = read_line();
  try {
    auto doc = json::parse(line);
    if (doc.contains("error")) {
      throw AnnotatorError("annotator reported an error for '" + std::string(doc_id) +
                           "': " + doc["error"].dump());
    }
  } catch (const json::parse_error&) {
    throw AnnotatorError("annotator broke the protocol: response is not JSON: " + line.substr(0, 200));
  }
  try {
    return parse_annotated_sentences(line);
  } catch (const FormatError& e) {
    throw AnnotatorError(std::string("annotator broke the protocol: ") + e.what());
  }
}

}  // namespace lgm
