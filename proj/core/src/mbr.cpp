#include "mbrkit/mbr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mbrkit/parallel.hpp"
#include "mbrkit/random.hpp"
#include "pairwise.hpp"

namespace mbrkit {

UtilityMatrix::UtilityMatrix(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (values_.size() != n * n) throw std::invalid_argument("utility matrix needs n*n values");
}

UtilityMatrix UtilityMatrix::submatrix(std::span<const std::size_t> indices) const {
  UtilityMatrix sub(indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a) {
    for (std::size_t b = 0; b < indices.size(); ++b) sub(a, b) = (*this)(indices[a], indices[b]);
  }
  return sub;
}

bool UtilityMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) return false;
    }
  }
  return true;
}

UtilityMatrix utility_matrix(std::span<const std::string> samples, const UtilityConfig& config,
                             const MatrixOptions& options) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("cannot build a utility matrix for an empty pool");
  const detail::PairwiseScorer scorer(samples, config);

  UtilityMatrix raw(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) raw(i, j) = scorer.raw(i, j);
  });

  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < n; ++i) degenerate += scorer.degenerate(i) ? 1 : 0;
  const std::size_t degenerate_cells = n * n - (n - degenerate) * (n - degenerate);

  if (!config.symmetric) {
    raw.degenerate_cells = degenerate_cells;
    return raw;
  }
  UtilityMatrix sym(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = harmonic_mean(raw(i, j), raw(j, i));
  }
  sym.degenerate_cells = degenerate_cells;
  return sym;
}

UtilityMatrix utility_matrix(const SamplePool& pool, const UtilityConfig& config,
                             const MatrixOptions& options) {
  return utility_matrix(pool.samples, config, options);
}

std::vector<double> expected_utilities(const UtilityMatrix& matrix, bool include_self) {
  const std::size_t n = matrix.size();
  std::vector<double> eu(n, 0.0);
  const bool self = include_self || n == 1;
  std::vector<double> row;
  row.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i && !self) continue;
      row.push_back(matrix(i, j));
    }
    // summing in sorted order makes the result independent of pool order
    std::sort(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += v;
    eu[i] = sum / static_cast<double>(self ? n : n - 1);
  }
  return eu;
}

std::size_t argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty range");
  const double best = *std::max_element(values.begin(), values.end());
  const double floor = best - kTieTolerance * std::max(1.0, std::abs(best));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= floor) return i;
  }
  return 0;
}

DecodeResult decode_with_matrix(const SamplePool& pool, const UtilityMatrix& full,
                                std::span<const std::size_t> indices, const UtilityConfig& config,
                                std::uint64_t seed, bool include_self) {
  DecodeResult result;
  result.sample_indices.assign(indices.begin(), indices.end());
  const UtilityMatrix sub = full.submatrix(indices);
  result.expected_utilities = expected_utilities(sub, include_self);
  result.selected_index = argmax_lowest(result.expected_utilities);
  result.selected_text = pool.samples[indices[result.selected_index]];
  result.num_samples_used = indices.size();
  result.utility_name = config.name();
  result.seed = seed;
  return result;
}

DecodeResult decode(const SamplePool& pool, const UtilityConfig& config,
                    const DecodeOptions& options) {
  const std::size_t n = pool.samples.size();
  if (n == 0) throw std::invalid_argument("pool '" + pool.id + "' has no samples");

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  if (options.subsample) {
    const std::size_t k = *options.subsample;
    if (k < 1 || k > n) {
      throw std::invalid_argument("subsample size " + std::to_string(k) + " out of range [1, " +
                                  std::to_string(n) + "] for pool '" + pool.id + "'");
    }
    Rng rng(options.seed);
    indices = sample_without_replacement(n, k, rng);
  }

  std::vector<std::string> drawn;
  drawn.reserve(indices.size());
  for (auto i : indices) drawn.push_back(pool.samples[i]);
  const UtilityMatrix matrix = utility_matrix(drawn, config, {options.threads});

  DecodeResult result;
  result.sample_indices = indices;
  result.expected_utilities = expected_utilities(matrix, options.include_self);
  result.selected_index = argmax_lowest(result.expected_utilities);
  result.selected_text = drawn[result.selected_index];
  result.num_samples_used = drawn.size();
  result.utility_name = config.name();
  result.seed = options.seed;
  return result;
}

std::uint64_t curve_seed(std::uint64_t seed, std::size_t size, std::size_t rep) {
  return derive_seed(derive_seed(seed, "curve-size", size), "curve-rep", rep);
}

std::vector<std::size_t> default_curve_grid() {
  std::vector<std::size_t> grid;
  for (std::size_t k = 5; k <= 100; k += 5) grid.push_back(k);
  return grid;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

namespace {

void validate_curve(std::span<const SamplePool> pools, const CurveOptions& options) {
  if (options.repetitions < 1) throw std::invalid_argument("curve repetitions must be >= 1");
  if (options.grid.empty()) throw std::invalid_argument("curve grid is empty");
  for (const auto& pool : pools) {
    for (std::size_t size : options.grid) {
      if (size == 0) throw std::invalid_argument("curve grid sizes must be >= 1");
      if (size > pool.samples.size()) {
        throw std::invalid_argument("grid size " + std::to_string(size) + " exceeds the " +
                                    std::to_string(pool.samples.size()) + " samples of pool '" +
                                    pool.id + "'");
      }
    }
  }
}

CurveReport run_curve(std::span<const SamplePool> pools, std::span<const std::uint64_t> pool_seeds,
                      const UtilityConfig& config, const CurveOptions& options) {
  validate_curve(pools, options);

  // Every subpool matrix is a submatrix of the full-pool matrix.
  std::vector<UtilityMatrix> full(pools.size());
  parallel_for(pools.size(), options.threads, [&](std::size_t p) {
    full[p] = utility_matrix(pools[p], config, {1});
  });

  const std::size_t cells = options.grid.size() * options.repetitions;
  CurveReport report;
  report.points.resize(cells * pools.size());
  parallel_for(report.points.size(), options.threads, [&](std::size_t slot) {
    const std::size_t cell = slot / pools.size();
    const std::size_t p = slot % pools.size();
    const std::size_t size = options.grid[cell / options.repetitions];
    const std::size_t rep = cell % options.repetitions;
    const std::uint64_t seed = curve_seed(pool_seeds[p], size, rep);
    Rng rng(seed);
    const auto indices = sample_without_replacement(pools[p].samples.size(), size, rng);
    report.points[slot] = CurvePoint{size, rep, p,
                                     decode_with_matrix(pools[p], full[p], indices, config, seed,
                                                        options.include_self)};
  });

  bool have_refs = !pools.empty();
  for (const auto& pool : pools) have_refs = have_refs && pool.reference.has_value();
  if (!have_refs) return report;

  std::vector<std::string> refs;
  refs.reserve(pools.size());
  for (const auto& pool : pools) refs.push_back(*pool.reference);

  for (std::size_t g = 0; g < options.grid.size(); ++g) {
    for (CorpusMetric metric : options.metrics) {
      CurveSummary summary;
      summary.size = options.grid[g];
      summary.metric = std::string(to_string(metric));
      for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        std::vector<std::string> hyps;
        hyps.reserve(pools.size());
        const std::size_t base = (g * options.repetitions + rep) * pools.size();
        for (std::size_t p = 0; p < pools.size(); ++p) {
          hyps.push_back(report.points[base + p].result.selected_text);
        }
        summary.values.push_back(corpus_score(hyps, refs, metric).value);
      }
      summary.mean = mean(summary.values);
      summary.stddev = sample_stddev(summary.values);
      report.summaries.push_back(std::move(summary));
    }
  }
  return report;
}

}  // namespace

CurveReport decode_curve(const SamplePool& pool, const UtilityConfig& config,
                         const CurveOptions& options) {
  const std::uint64_t seed = options.seed;
  return run_curve(std::span<const SamplePool>(&pool, 1), std::span<const std::uint64_t>(&seed, 1),
                   config, options);
}

CurveReport decode_curve(std::span<const SamplePool> pools, const UtilityConfig& config,
                         const CurveOptions& options) {
  std::vector<std::uint64_t> seeds(pools.size());
  for (std::size_t p = 0; p < pools.size(); ++p) seeds[p] = derive_seed(options.seed, "pool", p);
  return run_curve(pools, seeds, config, options);
}

}  // namespace mbrkit
