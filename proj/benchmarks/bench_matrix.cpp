#include <benchmark/benchmark.h>

#include <random>

#include "mbrkit/mbr.hpp"

using namespace mbrkit;

namespace {

std::vector<std::string> make_samples(std::size_t n) {
  static const std::vector<std::string> words = {"the", "a", "cat", "dog", "sat", "on", "mat", "ran",
                                                 "quickly", "house", "red", "under", "table", "."};
  std::mt19937 gen(1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const std::size_t len = 8 + gen() % 12;
    for (std::size_t t = 0; t < len; ++t) s += (t ? " " : "") + words[gen() % words.size()];
    out.push_back(s);
  }
  return out;
}

void BM_UtilityMatrix(benchmark::State& state, const char* utility) {
  const auto samples = make_samples(static_cast<std::size_t>(state.range(0)));
  const auto cfg = utility_preset(utility);
  for (auto _ : state) benchmark::DoNotOptimize(utility_matrix(samples, cfg, {1}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK_CAPTURE(BM_UtilityMatrix, chrf1, "chrf-1")->Arg(20)->Arg(100);
BENCHMARK_CAPTURE(BM_UtilityMatrix, bleu_exp, "bleu-exp")->Arg(20)->Arg(100);
BENCHMARK_CAPTURE(BM_UtilityMatrix, meteor, "meteor")->Arg(20)->Arg(100);
BENCHMARK_CAPTURE(BM_UtilityMatrix, chrf1_symmetric, "chrf-1-symmetric")->Arg(100);

void BM_Decode(benchmark::State& state) {
  SamplePool pool;
  pool.id = "bench";
  pool.samples = make_samples(static_cast<std::size_t>(state.range(0)));
  const auto cfg = utility_preset("chrf-1");
  for (auto _ : state) benchmark::DoNotOptimize(decode(pool, cfg, {.threads = 1}));
}
BENCHMARK(BM_Decode)->Arg(100);

}  // namespace
