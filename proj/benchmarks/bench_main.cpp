#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "lgm/graph.hpp"
#include "lgm/nlp.hpp"
#include "lgm/retrieval.hpp"
#include "lgm/rouge.hpp"

namespace {

std::vector<std::string> random_tokens(std::mt19937& rng, std::size_t n) {
  std::vector<std::string> out(n);
  for (auto& t : out) t = "w" + std::to_string(rng() % 50);
  return out;
}

void BM_RougeL(benchmark::State& state) {
  std::mt19937 rng(1);
  auto a = random_tokens(rng, state.range(0));
  auto b = random_tokens(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lgm::rouge_l(a, b));
}
BENCHMARK(BM_RougeL)->Arg(10)->Arg(40)->Arg(200);

void BM_ChunkRows(benchmark::State& state) {
  std::vector<lgm::EvidenceRow> rows;
  for (int i = 0; i < state.range(0); ++i)
    rows.push_back(
        {"concept" + std::to_string(i % 20), "Sentence number " + std::to_string(i) + " about things."});
  for (auto _ : state) benchmark::DoNotOptimize(lgm::chunk_rows(rows, 30000));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChunkRows)->Arg(100)->Arg(10000);

void BM_SentencesForConcepts(benchmark::State& state) {
  std::mt19937 rng(2);
  lgm::LanguageGraph g;
  auto sec = g.add_section("bench");
  for (int i = 0; i < state.range(0); ++i) {
    auto a = "c" + std::to_string(rng() % 500), b = "c" + std::to_string(rng() % 500);
    g.add_sentence(sec, a + " likes " + b + ".", a + " like " + b + " .");
  }
  for (int i = 0; i < 500; i += 5) g.upsert_concept("c" + std::to_string(i));
  std::vector<std::string> query = {"c1", "c10", "c100", "c250", "c499"};
  for (auto _ : state) benchmark::DoNotOptimize(g.sentences_for_concepts(query));
}
BENCHMARK(BM_SentencesForConcepts)->Arg(1000)->Arg(20000);

void BM_Annotate(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < state.range(0); ++i)
    text += "Apples are a type of fruit. They contain many vitamins and grow on trees in the orchard. ";
  lgm::BuiltinAnnotator ann;
  for (auto _ : state) benchmark::DoNotOptimize(ann.annotate("bench", text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Annotate)->Arg(10)->Arg(500);

}  // namespace
BENCHMARK_MAIN();
