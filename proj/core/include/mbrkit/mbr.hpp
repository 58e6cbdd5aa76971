#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbrkit/metrics.hpp"
#include "mbrkit/utility.hpp"

namespace mbrkit {

/// One source sentence with its candidate samples. Samples may repeat.
struct SamplePool {
  std::string id;
  std::string source;
  std::optional<std::string> reference;
  std::vector<std::string> samples;
  std::optional<std::vector<std::string>> beam;

  bool operator==(const SamplePool&) const = default;
};

/// n x n utilities, entry (i, j) = u(s_i, s_j), row-major.
class UtilityMatrix {
 public:
  UtilityMatrix() = default;
  explicit UtilityMatrix(std::size_t n, double fill = 0.0) : n_(n), values_(n * n, fill) {}
  UtilityMatrix(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }
  std::span<const double> values() const { return values_; }

  /// Matrix restricted to the given rows/columns, in the given order.
  UtilityMatrix submatrix(std::span<const std::size_t> indices) const;

  bool is_symmetric() const;

  /// Cells forced to 0 because a sample was degenerate (e.g. empty).
  std::size_t degenerate_cells = 0;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct MatrixOptions {
  /// Worker threads for the pairwise fill; 0 = hardware concurrency. The
  /// assembled matrix does not depend on this.
  unsigned threads = 0;
};

/// All n^2 pairwise utilities. Per-sample n-gram profiles are built once and
/// reused for every pair.
UtilityMatrix utility_matrix(std::span<const std::string> samples, const UtilityConfig& config,
                             const MatrixOptions& options = {});
UtilityMatrix utility_matrix(const SamplePool& pool, const UtilityConfig& config,
                             const MatrixOptions& options = {});

/// Row means. With include_self = false the diagonal is left out and the
/// mean is taken over n - 1 peers (a 1x1 matrix keeps its single entry).
std::vector<double> expected_utilities(const UtilityMatrix& matrix, bool include_self = true);

/// Values this close to the maximum (relative to max(1, |max|)) count as tied,
/// so rounding noise in mathematically equal utilities cannot pick the winner.
inline constexpr double kTieTolerance = 1e-12;

/// Smallest index whose value ties the maximum.
std::size_t argmax_lowest(std::span<const double> values);

struct DecodeOptions {
  /// Draw this many samples without replacement before decoding.
  std::optional<std::size_t> subsample;
  std::uint64_t seed = 0;
  bool include_self = true;
  unsigned threads = 0;
};

struct DecodeResult {
  /// Index into the (sub)pool actually decoded.
  std::size_t selected_index = 0;
  std::string selected_text;
  std::vector<double> expected_utilities;
  std::size_t num_samples_used = 0;
  std::string utility_name;
  std::uint64_t seed = 0;
  /// Positions in the original pool of the decoded samples, increasing.
  std::vector<std::size_t> sample_indices;

  bool operator==(const DecodeResult&) const = default;
};

DecodeResult decode(const SamplePool& pool, const UtilityConfig& config,
                    const DecodeOptions& options = {});

/// Decodes a subpool using a precomputed full-pool matrix. The result is
/// identical to decoding the subpool from scratch.
DecodeResult decode_with_matrix(const SamplePool& pool, const UtilityMatrix& full,
                                std::span<const std::size_t> indices, const UtilityConfig& config,
                                std::uint64_t seed, bool include_self = true);

struct CurveOptions {
  std::vector<std::size_t> grid;
  std::size_t repetitions = 2;
  std::uint64_t seed = 0;
  bool include_self = true;
  unsigned threads = 0;
  std::vector<CorpusMetric> metrics = {CorpusMetric::chrf1};
};

/// The seed used for repetition `rep` at pool size `size`.
std::uint64_t curve_seed(std::uint64_t seed, std::size_t size, std::size_t rep);

/// 5, 10, ..., 100.
std::vector<std::size_t> default_curve_grid();

struct CurvePoint {
  std::size_t size = 0;
  std::size_t rep = 0;
  std::size_t pool = 0;
  DecodeResult result;
};

struct CurveSummary {
  std::size_t size = 0;
  std::string metric;
  std::vector<double> values;  // one per repetition
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single repetition
};

struct CurveReport {
  std::vector<CurvePoint> points;      // grid size, then repetition, then pool
  std::vector<CurveSummary> summaries; // empty when there is no reference
};

/// Subsampled decodes for every grid size and repetition of one pool.
/// Throws std::invalid_argument if a grid size is 0 or exceeds the pool.
CurveReport decode_curve(const SamplePool& pool, const UtilityConfig& config,
                         const CurveOptions& options);

/// Corpus-level version: pool k uses seed derive_seed(options.seed, "pool", k),
/// and each (size, rep) cell is evaluated as a corpus against the references.
CurveReport decode_curve(std::span<const SamplePool> pools, const UtilityConfig& config,
                         const CurveOptions& options);

double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);

}  // namespace mbrkit
