#include <benchmark/benchmark.h>

#include "mbrkit/metrics.hpp"

using namespace mbrkit;

namespace {

const std::string kHyp = "The committee approved the proposal after a long debate on Tuesday evening .";
const std::string kRef = "After a lengthy debate on Tuesday night , the committee approved the proposal .";

void BM_Tokenize13a(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(tokenize_13a(kHyp));
}
BENCHMARK(BM_Tokenize13a);

void BM_SentenceChrf(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sentence_chrf(kHyp, kRef, 2.0));
}
BENCHMARK(BM_SentenceChrf);

void BM_SentenceBleu(benchmark::State& state) {
  const auto h = tokenize_13a(kHyp);
  const auto r = tokenize_13a(kRef);
  for (auto _ : state) benchmark::DoNotOptimize(sentence_bleu(h, r, Smoothing::exp));
}
BENCHMARK(BM_SentenceBleu);

void BM_SentenceMeteor(benchmark::State& state) {
  const auto h = tokenize_13a(kHyp);
  const auto r = tokenize_13a(kRef);
  for (auto _ : state) benchmark::DoNotOptimize(sentence_meteor(h, r));
}
BENCHMARK(BM_SentenceMeteor);

}  // namespace
BENCHMARK_MAIN();
