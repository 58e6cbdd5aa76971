#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mbrkit/mbr.hpp"

namespace mbrkit {

// ---------------------------------------------------------------------------
// Length statistics

struct NamedCorpus {
  std::string name;
  std::vector<std::string> sentences;
};

struct LengthTable {
  /// (system name, mean 13a token count), in input order.
  std::vector<std::pair<std::string, double>> rows;

  std::optional<double> mean_of(std::string_view name) const;
};

/// Mean 13a token count per corpus. Throws std::invalid_argument for an
/// empty corpus.
LengthTable length_stats(std::span<const NamedCorpus> corpora);

// ---------------------------------------------------------------------------
// Token frequency buckets

/// Count ranges [lower_i, lower_{i+1}) with the last range open-ended.
/// Lower bounds start at 1 and increase strictly, so the ranges cover [1, inf).
class BucketScheme {
 public:
  /// Decade buckets [1,10), [10,100), ... with `decades` closed ranges
  /// followed by an open-ended one.
  static BucketScheme log10(std::size_t decades = 7);

  /// "log10" for the default decades, or explicit lower bounds "1,10,100,1000".
  static BucketScheme parse(std::string_view text);

  explicit BucketScheme(std::vector<std::uint64_t> lower_bounds);

  const std::vector<std::uint64_t>& lower_bounds() const { return lower_bounds_; }
  std::size_t size() const { return lower_bounds_.size(); }

  /// Bucket index for a positive count.
  std::size_t bucket_of(std::uint64_t count) const;

  /// "[1,10)", ..., "[1000000,inf)".
  std::string label(std::size_t bucket) const;

  /// Compact description recorded in report headers.
  std::string describe() const;

 private:
  std::vector<std::uint64_t> lower_bounds_;
};

struct FrequencyTable {
  std::unordered_map<std::string, std::uint64_t> token_counts;
  BucketScheme buckets = BucketScheme::log10();
  std::uint64_t total_tokens = 0;

  /// Index of the out-of-vocabulary bucket, one past the count buckets.
  std::size_t oov_bucket() const { return buckets.size(); }

  /// Bucket of a token; unseen tokens map to oov_bucket().
  std::size_t bucket_of(std::string_view token) const;

  std::string bucket_label(std::size_t bucket) const;
};

FrequencyTable build_frequency_table(std::span<const std::string> training_tokens,
                                     const BucketScheme& scheme = BucketScheme::log10());

struct BucketDistribution {
  std::vector<std::uint64_t> counts;  // per bucket, OOV last
  std::vector<double> probability;    // counts / total
  std::uint64_t total = 0;
};

/// Share of corpus tokens that fall into each training-frequency bucket.
/// Throws std::invalid_argument for an empty corpus.
BucketDistribution token_probability_by_bucket(const FrequencyTable& table,
                                               std::span<const std::string> tokens);

/// The bucket distribution of the training corpus itself, from its counts.
BucketDistribution training_distribution(const FrequencyTable& table);

/// Concatenated 13a tokens of every line.
std::vector<std::string> tokenize_corpus(std::span<const std::string> lines);

// ---------------------------------------------------------------------------
// Hallucinations and copies

inline constexpr double kHallucinationThreshold = 0.01;
inline constexpr double kCopyThreshold = 0.9;

/// sentence chrF2 against the reference below `threshold`.
bool is_hallucination(std::string_view hyp, std::string_view ref,
                      double threshold = kHallucinationThreshold);

enum class OverlapMode {
  jaccard,        ///< |H n A| / |H u A| over 13a token sets
  anchor_coverage ///< |H n A| / |A|
};

enum class CopyAnchor { reference, source };

std::string_view to_string(OverlapMode mode);
std::string_view to_string(CopyAnchor anchor);
OverlapMode parse_overlap_mode(std::string_view name);
CopyAnchor parse_copy_anchor(std::string_view name);

double word_overlap(std::string_view hyp, std::string_view anchor,
                    OverlapMode mode = OverlapMode::jaccard);

/// Overlap strictly greater than `threshold`. Throws UndefinedMetric for an
/// anchor without tokens.
bool is_copy(std::string_view hyp, std::string_view anchor, double threshold = kCopyThreshold,
             OverlapMode mode = OverlapMode::jaccard);

enum class PathologyKind { copy, hallucination };
std::string_view to_string(PathologyKind kind);

struct PathologyOptions {
  CopyAnchor copy_anchor = CopyAnchor::reference;
  double copy_threshold = kCopyThreshold;
  OverlapMode overlap = OverlapMode::jaccard;
  double hallucination_threshold = kHallucinationThreshold;
  bool include_self = true;
};

struct PathologyReport {
  PathologyKind kind = PathologyKind::copy;
  /// Mean expected utility of flagged pool samples; absent when none is flagged.
  std::optional<double> mean_utility_flagged;
  double mean_utility_all = 0.0;
  double flagged_rate_in_pools = 0.0;
  double flagged_rate_in_selections = 0.0;
  /// Rate among first beam outputs, when every pool carries a beam list.
  std::optional<double> flagged_rate_in_beam;
  std::size_t pools = 0;
  std::size_t samples = 0;
  std::size_t flagged_samples = 0;
  std::size_t flagged_selections = 0;
};

/// Flags every decoded pool sample and summarizes utility and selection
/// rates. matrices[k] is the utility matrix of the samples results[k]
/// decoded (results[k].sample_indices, or the whole pool when empty).
/// Throws std::invalid_argument on misaligned inputs or a missing anchor.
PathologyReport pathology_report(std::span<const SamplePool> pools,
                                 std::span<const DecodeResult> results,
                                 std::span<const UtilityMatrix> matrices, PathologyKind kind,
                                 const PathologyOptions& options = {});

}  // namespace mbrkit
