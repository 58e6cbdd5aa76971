#include "mbrkit/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mbrkit/metrics.hpp"
#include "mbrkit/text.hpp"

namespace mbrkit {

std::optional<double> LengthTable::mean_of(std::string_view name) const {
  for (const auto& [row, value] : rows) {
    if (row == name) return value;
  }
  return std::nullopt;
}

LengthTable length_stats(std::span<const NamedCorpus> corpora) {
  LengthTable table;
  for (const auto& corpus : corpora) {
    if (corpus.sentences.empty()) {
      throw std::invalid_argument("corpus '" + corpus.name + "' is empty");
    }
    double tokens = 0.0;
    for (const auto& s : corpus.sentences) tokens += static_cast<double>(tokenize_13a(s).size());
    table.rows.emplace_back(corpus.name, tokens / static_cast<double>(corpus.sentences.size()));
  }
  return table;
}

BucketScheme::BucketScheme(std::vector<std::uint64_t> lower_bounds)
    : lower_bounds_(std::move(lower_bounds)) {
  if (lower_bounds_.empty() || lower_bounds_.front() != 1) {
    throw std::invalid_argument("bucket lower bounds must start at 1");
  }
  for (std::size_t i = 1; i < lower_bounds_.size(); ++i) {
    if (lower_bounds_[i] <= lower_bounds_[i - 1]) {
      throw std::invalid_argument("bucket lower bounds must increase strictly");
    }
  }
}

BucketScheme BucketScheme::log10(std::size_t decades) {
  std::vector<std::uint64_t> bounds{1};
  for (std::size_t d = 0; d < decades; ++d) bounds.push_back(bounds.back() * 10);
  return BucketScheme(std::move(bounds));
}

BucketScheme BucketScheme::parse(std::string_view text) {
  if (text == "log10") return log10();
  std::vector<std::uint64_t> bounds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view piece = text.substr(pos, comma - pos);
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (piece.empty() || ec != std::errc{} || end != piece.data() + piece.size()) {
      throw std::invalid_argument("bad bucket scheme '" + std::string(text) +
                                  "': expected 'log10' or comma-separated lower bounds");
    }
    bounds.push_back(value);
    pos = comma + 1;
  }
  return BucketScheme(std::move(bounds));
}

std::size_t BucketScheme::bucket_of(std::uint64_t count) const {
  if (count == 0) throw std::invalid_argument("bucket_of needs a positive count");
  const auto it = std::upper_bound(lower_bounds_.begin(), lower_bounds_.end(), count);
  return static_cast<std::size_t>(it - lower_bounds_.begin()) - 1;
}

std::string BucketScheme::label(std::size_t bucket) const {
  if (bucket >= lower_bounds_.size()) return "OOV";
  std::string out = "[" + std::to_string(lower_bounds_[bucket]) + ",";
  out += bucket + 1 < lower_bounds_.size() ? std::to_string(lower_bounds_[bucket + 1]) : "inf";
  return out + ")";
}

std::string BucketScheme::describe() const {
  std::ostringstream out;
  out << "lower_bounds=";
  for (std::size_t i = 0; i < lower_bounds_.size(); ++i) out << (i ? "," : "") << lower_bounds_[i];
  out << " oov_bucket=last";
  return out.str();
}

std::size_t FrequencyTable::bucket_of(std::string_view token) const {
  const auto it = token_counts.find(std::string(token));
  if (it == token_counts.end()) return oov_bucket();
  return buckets.bucket_of(it->second);
}

std::string FrequencyTable::bucket_label(std::size_t bucket) const { return buckets.label(bucket); }

FrequencyTable build_frequency_table(std::span<const std::string> training_tokens,
                                     const BucketScheme& scheme) {
  if (training_tokens.empty()) throw std::invalid_argument("training corpus has no tokens");
  FrequencyTable table;
  table.buckets = scheme;
  for (const auto& t : training_tokens) ++table.token_counts[t];
  table.total_tokens = training_tokens.size();
  return table;
}

namespace {

BucketDistribution normalize(std::vector<std::uint64_t> counts) {
  BucketDistribution dist;
  for (auto c : counts) dist.total += c;
  dist.probability.resize(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) {
    dist.probability[b] = static_cast<double>(counts[b]) / static_cast<double>(dist.total);
  }
  dist.counts = std::move(counts);
  return dist;
}

}  // namespace

BucketDistribution token_probability_by_bucket(const FrequencyTable& table,
                                               std::span<const std::string> tokens) {
  if (tokens.empty()) throw std::invalid_argument("corpus has no tokens");
  std::vector<std::uint64_t> counts(table.oov_bucket() + 1, 0);
  for (const auto& t : tokens) ++counts[table.bucket_of(t)];
  return normalize(std::move(counts));
}

BucketDistribution training_distribution(const FrequencyTable& table) {
  if (table.total_tokens == 0) throw std::invalid_argument("empty frequency table");
  std::vector<std::uint64_t> counts(table.oov_bucket() + 1, 0);
  for (const auto& [token, count] : table.token_counts) counts[table.buckets.bucket_of(count)] += count;
  return normalize(std::move(counts));
}

std::vector<std::string> tokenize_corpus(std::span<const std::string> lines) {
  std::vector<std::string> out;
  for (const auto& line : lines) {
    auto seq = tokenize_13a(line);
    std::move(seq.tokens.begin(), seq.tokens.end(), std::back_inserter(out));
  }
  return out;
}

bool is_hallucination(std::string_view hyp, std::string_view ref, double threshold) {
  if (utf8::remove_space(ref).empty()) {
    throw UndefinedMetric("hallucination check needs a nonempty reference");
  }
  return sentence_chrf(hyp, ref, 2.0) < threshold;
}

std::string_view to_string(OverlapMode mode) {
  return mode == OverlapMode::jaccard ? "jaccard" : "anchor-coverage";
}

std::string_view to_string(CopyAnchor anchor) {
  return anchor == CopyAnchor::reference ? "reference" : "source";
}

std::string_view to_string(PathologyKind kind) {
  return kind == PathologyKind::copy ? "copy" : "hallucination";
}

OverlapMode parse_overlap_mode(std::string_view name) {
  if (name == "jaccard") return OverlapMode::jaccard;
  if (name == "anchor-coverage") return OverlapMode::anchor_coverage;
  throw std::invalid_argument("unknown overlap mode '" + std::string(name) +
                              "' (expected jaccard or anchor-coverage)");
}

CopyAnchor parse_copy_anchor(std::string_view name) {
  if (name == "reference") return CopyAnchor::reference;
  if (name == "source") return CopyAnchor::source;
  throw std::invalid_argument("unknown copy anchor '" + std::string(name) +
                              "' (expected reference or source)");
}

double word_overlap(std::string_view hyp, std::string_view anchor, OverlapMode mode) {
  const auto a_seq = tokenize_13a(anchor);
  if (a_seq.empty()) throw UndefinedMetric("word overlap needs a nonempty anchor");
  const auto h_seq = tokenize_13a(hyp);
  const std::set<std::string> h(h_seq.tokens.begin(), h_seq.tokens.end());
  const std::set<std::string> a(a_seq.tokens.begin(), a_seq.tokens.end());
  std::size_t common = 0;
  for (const auto& t : h) common += a.count(t);
  const std::size_t denom = mode == OverlapMode::jaccard ? h.size() + a.size() - common : a.size();
  return static_cast<double>(common) / static_cast<double>(denom);
}

bool is_copy(std::string_view hyp, std::string_view anchor, double threshold, OverlapMode mode) {
  return word_overlap(hyp, anchor, mode) > threshold;
}

PathologyReport pathology_report(std::span<const SamplePool> pools,
                                 std::span<const DecodeResult> results,
                                 std::span<const UtilityMatrix> matrices, PathologyKind kind,
                                 const PathologyOptions& options) {
  if (pools.size() != results.size() || pools.size() != matrices.size()) {
    throw std::invalid_argument("pathology report needs aligned inputs: " +
                                std::to_string(pools.size()) + " pools, " +
                                std::to_string(results.size()) + " results, " +
                                std::to_string(matrices.size()) + " matrices");
  }
  if (pools.empty()) throw std::invalid_argument("pathology report needs at least one pool");

  PathologyReport report;
  report.kind = kind;
  report.pools = pools.size();

  auto anchor_of = [&](const SamplePool& pool) -> const std::string& {
    const bool use_source = kind == PathologyKind::copy && options.copy_anchor == CopyAnchor::source;
    if (use_source) return pool.source;
    if (!pool.reference) {
      throw std::invalid_argument("pool '" + pool.id + "' has no reference");
    }
    return *pool.reference;
  };
  auto flagged = [&](std::string_view text, const std::string& anchor) {
    return kind == PathologyKind::copy
               ? is_copy(text, anchor, options.copy_threshold, options.overlap)
               : is_hallucination(text, anchor, options.hallucination_threshold);
  };

  double sum_all = 0.0;
  double sum_flagged = 0.0;
  bool beam_everywhere = true;
  std::size_t beam_flagged = 0;
  for (std::size_t k = 0; k < pools.size(); ++k) {
    const SamplePool& pool = pools[k];
    const DecodeResult& result = results[k];
    std::vector<std::size_t> indices = result.sample_indices;
    if (indices.empty()) {
      indices.resize(pool.samples.size());
      for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    }
    if (matrices[k].size() != indices.size() || result.selected_index >= indices.size()) {
      throw std::invalid_argument("pool '" + pool.id + "': decode result and matrix disagree on " +
                                  "the number of samples");
    }
    for (auto i : indices) {
      if (i >= pool.samples.size()) {
        throw std::invalid_argument("pool '" + pool.id + "': sample index out of range");
      }
    }
    const std::string& anchor = anchor_of(pool);
    const auto eu = expected_utilities(matrices[k], options.include_self);
    for (std::size_t a = 0; a < indices.size(); ++a) {
      const bool f = flagged(pool.samples[indices[a]], anchor);
      sum_all += eu[a];
      ++report.samples;
      if (f) {
        sum_flagged += eu[a];
        ++report.flagged_samples;
      }
    }
    if (flagged(pool.samples[indices[result.selected_index]], anchor)) ++report.flagged_selections;
    if (pool.beam && !pool.beam->empty()) {
      beam_flagged += flagged(pool.beam->front(), anchor) ? 1 : 0;
    } else {
      beam_everywhere = false;
    }
  }

  const auto n_pools = static_cast<double>(report.pools);
  report.mean_utility_all = sum_all / static_cast<double>(report.samples);
  if (report.flagged_samples > 0) {
    report.mean_utility_flagged = sum_flagged / static_cast<double>(report.flagged_samples);
  }
  report.flagged_rate_in_pools =
      static_cast<double>(report.flagged_samples) / static_cast<double>(report.samples);
  report.flagged_rate_in_selections = static_cast<double>(report.flagged_selections) / n_pools;
  if (beam_everywhere) report.flagged_rate_in_beam = static_cast<double>(beam_flagged) / n_pools;
  return report;
}

}  // namespace mbrkit
