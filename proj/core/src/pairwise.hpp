#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mbrkit/utility.hpp"

namespace mbrkit::detail {

/// (interned n-gram id, count), sorted by id.
using SparseCounts = std::vector<std::pair<std::uint32_t, std::int64_t>>;

std::int64_t clipped_overlap(const SparseCounts& a, const SparseCounts& b);

/// Precomputes per-sample profiles for one pool so that each pairwise
/// utility reduces to merges over sorted integer vectors. Produces the same
/// integer statistics, and therefore bit-identical scores, as the string-based
/// sentence metrics.
class PairwiseScorer {
 public:
  PairwiseScorer(std::span<const std::string> samples, const UtilityConfig& config);

  std::size_t size() const { return samples_.size(); }
  bool degenerate(std::size_t i) const { return samples_[i].degenerate; }

  /// u(s_i, s_j) without symmetrization; 0 if either side is degenerate.
  double raw(std::size_t i, std::size_t j) const;

 private:
  struct Sample {
    bool degenerate = false;
    std::int64_t length = 0;
    std::array<SparseCounts, 6> orders;
    std::array<std::int64_t, 6> totals{};
    std::vector<std::uint32_t> tokens;
    SparseCounts function_unigrams;
    std::int64_t function_count = 0;
  };

  void build_chrf(std::span<const std::string> samples);
  void build_tokens(std::span<const std::string> samples, int max_order);

  UtilityConfig config_;
  std::vector<Sample> samples_;
};

}  // namespace mbrkit::detail
