// Stand-in for an external NLP toolkit speaking the annotator line protocol.
// argv[1] picks the behaviour: ok, error, garbage, exit, hang.
#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include "json.hpp"
#include "lgm/annotator_process.hpp"
#include "lgm/nlp.hpp"

int main(int argc, char** argv) {
  std::string mode = argc > 1 ? argv[1] : "ok";
  std::string line;
  lgm::BuiltinAnnotator builtin;
  while (std::getline(std::cin, line)) {
    if (mode == "exit") return 3;
    if (mode == "hang") std::this_thread::sleep_for(std::chrono::hours(1));
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    auto req = nlohmann::json::parse(line);
    if (mode == "error") {
      std::cout << nlohmann::json{{"error", "cannot parse " + req["doc_id"].get<std::string>()}}.dump()
                << std::endl;
      continue;
    }
    auto sents = builtin.annotate(req["doc_id"].get<std::string>(), req["text"].get<std::string>());
    auto body = lgm::annotated_sentences_to_json(sents);
    // One line per response.
    std::cout << nlohmann::json::parse(body).dump() << std::endl;
  }
  return 0;
}
