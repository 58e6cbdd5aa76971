#include "mbrkit/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "mbrkit/parallel.hpp"
#include "mbrkit/random.hpp"

namespace mbrkit {

void ParallelCorpus::validate() const {
  if (!provenance.empty() && provenance.size() != pairs.size()) {
    throw std::invalid_argument("provenance has " + std::to_string(provenance.size()) +
                                " tags for " + std::to_string(pairs.size()) + " pairs");
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].source.empty()) {
      throw std::invalid_argument("pair " + std::to_string(i + 1) + " has an empty source");
    }
  }
}

ParallelCorpus make_corpus(std::vector<std::string> sources, std::vector<std::string> targets) {
  if (sources.size() != targets.size()) {
    throw std::invalid_argument("source has " + std::to_string(sources.size()) +
                                " lines but target has " + std::to_string(targets.size()));
  }
  ParallelCorpus corpus;
  corpus.pairs.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    corpus.pairs.push_back({std::move(sources[i]), std::move(targets[i])});
  }
  corpus.validate();
  return corpus;
}

std::string_view to_string(NoiseMode mode) {
  return mode == NoiseMode::bernoulli ? "bernoulli" : "exact-count";
}

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "bernoulli") return NoiseMode::bernoulli;
  if (name == "exact-count") return NoiseMode::exact_count;
  throw std::invalid_argument("unknown noise mode '" + std::string(name) +
                              "' (expected bernoulli or exact-count)");
}

ParallelCorpus inject_copy_noise(const ParallelCorpus& corpus, double p, std::uint64_t seed,
                                 NoiseMode mode, unsigned threads) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("noise probability must lie in [0, 1], got " + std::to_string(p));
  }
  corpus.validate();
  const std::size_t n = corpus.size();
  ParallelCorpus out = corpus;
  out.provenance.assign(n, Provenance::clean);
  if (!corpus.provenance.empty()) out.provenance = corpus.provenance;

  std::vector<char> hit(n, 0);
  if (mode == NoiseMode::bernoulli) {
    const std::size_t chunks = (n + kNoiseChunk - 1) / kNoiseChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
      Rng rng(derive_seed(seed, "copy-noise", c));
      const std::size_t end = std::min(n, (c + 1) * kNoiseChunk);
      for (std::size_t i = c * kNoiseChunk; i < end; ++i) hit[i] = rng.bernoulli(p) ? 1 : 0;
    });
  } else {
    const auto k = static_cast<std::size_t>(std::llround(p * static_cast<double>(n)));
    Rng rng(derive_seed(seed, "copy-noise-exact"));
    for (auto i : sample_without_replacement(n, k, rng)) hit[i] = 1;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!hit[i]) continue;
    out.pairs[i].target = out.pairs[i].source;
    out.provenance[i] = Provenance::copy_injected;
  }
  return out;
}

const std::vector<double>& default_noise_grid() {
  static const std::vector<double> grid{0.001, 0.005, 0.01, 0.05, 0.1, 0.25, 0.5};
  return grid;
}

std::pair<ParallelCorpus, ParallelCorpus> split_holdout(const ParallelCorpus& corpus,
                                                        std::size_t size, std::uint64_t seed) {
  corpus.validate();
  const std::size_t n = corpus.size();
  if (size == 0 || size >= n) {
    throw std::invalid_argument("held-out size " + std::to_string(size) +
                                " must lie strictly between 0 and the corpus size " +
                                std::to_string(n));
  }
  Rng rng(derive_seed(seed, "holdout"));
  const auto held = sample_without_replacement(n, size, rng);
  std::vector<char> in_held(n, 0);
  for (auto i : held) in_held[i] = 1;

  std::pair<ParallelCorpus, ParallelCorpus> parts;
  const bool tagged = !corpus.provenance.empty();
  for (std::size_t i = 0; i < n; ++i) {
    ParallelCorpus& dst = in_held[i] ? parts.second : parts.first;
    dst.pairs.push_back(corpus.pairs[i]);
    if (tagged) dst.provenance.push_back(corpus.provenance[i]);
  }
  return parts;
}

}  // namespace mbrkit
