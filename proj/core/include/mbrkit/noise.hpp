#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mbrkit {

enum class Provenance : std::uint8_t { clean = 0, copy_injected = 1 };

struct SentencePair {
  std::string source;
  std::string target;

  bool operator==(const SentencePair&) const = default;
  auto operator<=>(const SentencePair&) const = default;
};

/// Aligned sentence pairs with an optional per-pair provenance tag.
struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  /// Empty, or one tag per pair.
  std::vector<Provenance> provenance;

  std::size_t size() const { return pairs.size(); }

  /// Throws std::invalid_argument if a source is empty or the tags are misaligned.
  void validate() const;

  bool operator==(const ParallelCorpus&) const = default;
};

/// Builds a corpus from aligned line lists; throws on a count mismatch.
ParallelCorpus make_corpus(std::vector<std::string> sources, std::vector<std::string> targets);

enum class NoiseMode {
  bernoulli,   ///< each pair independently with probability p
  exact_count  ///< exactly round(p * n) pairs, chosen uniformly
};

std::string_view to_string(NoiseMode mode);
NoiseMode parse_noise_mode(std::string_view name);

/// Pairs are drawn in chunks of this size, each from its own derived seed.
inline constexpr std::size_t kNoiseChunk = 4096;

/// Replaces selected targets by their sources and tags them copy_injected.
/// Order and length are preserved; everything else is left untouched.
/// Throws std::invalid_argument unless 0 <= p <= 1.
ParallelCorpus inject_copy_noise(const ParallelCorpus& corpus, double p, std::uint64_t seed,
                                 NoiseMode mode = NoiseMode::bernoulli, unsigned threads = 1);

/// Probabilities used when no grid is requested.
const std::vector<double>& default_noise_grid();

/// Uniform split without replacement into (train, heldout). Both parts keep
/// the input order. Throws std::invalid_argument unless 0 < size < n.
std::pair<ParallelCorpus, ParallelCorpus> split_holdout(const ParallelCorpus& corpus,
                                                        std::size_t size, std::uint64_t seed);

}  // namespace mbrkit
