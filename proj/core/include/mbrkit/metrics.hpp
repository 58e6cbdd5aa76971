#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mbrkit/text.hpp"

namespace mbrkit {

/// Raised when a metric is undefined for its inputs, e.g. an empty reference.
class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// BLEU

enum class Smoothing { none, floor, add_k, exp };

std::string_view to_string(Smoothing smoothing);

/// Sentence-level BLEU settings. Smoothing follows Chen & Cherry (2014) as
/// implemented by the reference scorer: `floor` replaces a zero precision by
/// floor_value / total, `add_k` adds k to matches and totals of orders >= 2,
/// `exp` halves the pseudo-count for each successive zero-match order.
struct BleuParams {
  Smoothing smoothing = Smoothing::exp;
  double floor_value = 0.1;
  double add_k = 1.0;
  /// Average only over orders the hypothesis is long enough to have.
  bool effective_order = true;

  bool operator==(const BleuParams&) const = default;
};

struct BleuStats {
  std::array<std::int64_t, kWordNGramOrder> matches{};
  std::array<std::int64_t, kWordNGramOrder> totals{};
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(const TokenSeq& hyp, const TokenSeq& ref);
double bleu_from_stats(const BleuStats& stats, const BleuParams& params);

/// Throws UndefinedMetric for an empty reference; an empty hypothesis scores 0.
double sentence_bleu(const TokenSeq& hyp, const TokenSeq& ref, const BleuParams& params = {});
double sentence_bleu(const TokenSeq& hyp, const TokenSeq& ref, Smoothing smoothing);

// ---------------------------------------------------------------------------
// chrF

struct ChrfStats {
  std::array<std::int64_t, kCharNGramOrder> hyp{};
  std::array<std::int64_t, kCharNGramOrder> ref{};
  std::array<std::int64_t, kCharNGramOrder> match{};

  ChrfStats& operator+=(const ChrfStats& other);
};

ChrfStats chrf_stats(const NGramProfile& hyp, const NGramProfile& ref);

/// Precision and recall are averaged over the orders where both sides have
/// at least one n-gram, then combined into F_beta. Returns 0 when no order
/// qualifies or when both averages are 0.
double chrf_from_stats(const ChrfStats& stats, double beta);

/// chrF with character orders 1..6 and whitespace removed.
double sentence_chrf(std::string_view hyp, std::string_view ref, double beta = 2.0);

// ---------------------------------------------------------------------------
// METEOR (exact-match stage only)

struct MeteorParams {
  double alpha = 0.85;
  double beta = 0.2;
  double gamma = 0.6;
  double delta = 0.75;

  bool operator==(const MeteorParams&) const = default;
};

/// Function-word lexicon: UTF-8, one token per line.
class FunctionWords {
 public:
  FunctionWords() = default;
  explicit FunctionWords(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  static FunctionWords load(const std::filesystem::path& path);

  bool contains(std::string_view token) const { return words_.count(std::string(token)) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

struct Alignment {
  std::int64_t matches = 0;
  std::int64_t chunks = 0;
  /// False when the chunk search hit its node budget and returned the best
  /// alignment found so far.
  bool exhaustive = true;
};

/// Exact-match alignment over interned tokens: maximizes matches, then
/// minimizes the number of chunks (runs contiguous in both sequences).
Alignment align_exact(std::span<const std::uint32_t> hyp, std::span<const std::uint32_t> ref,
                      std::size_t node_budget = 200000);

struct MeteorStats {
  std::int64_t matches = 0;
  std::int64_t chunks = 0;
  std::int64_t hyp_content = 0;
  std::int64_t hyp_function = 0;
  std::int64_t ref_content = 0;
  std::int64_t ref_function = 0;
  std::int64_t matched_function = 0;
};

MeteorStats meteor_stats(const TokenSeq& hyp, const TokenSeq& ref,
                         const FunctionWords* function_words = nullptr);

/// Weighted P/R with content weight delta, F_mean = PR / (aP + (1-a)R),
/// penalty = gamma * (chunks/matches)^beta, score = F_mean * (1 - penalty).
double meteor_from_stats(const MeteorStats& stats, const MeteorParams& params);

double sentence_meteor(const TokenSeq& hyp, const TokenSeq& ref, const MeteorParams& params = {},
                       const FunctionWords* function_words = nullptr);

// ---------------------------------------------------------------------------
// Misc

/// 2 * matches / (|hyp| + |ref|) over unigram multisets.
double unigram_f1(const TokenSeq& hyp, const TokenSeq& ref);

/// 2xy / (x + y), and 0 when either argument is 0.
double harmonic_mean(double x, double y);

template <class Utility, class T>
double symmetrize(Utility&& u, const T& a, const T& b) {
  return harmonic_mean(u(a, b), u(b, a));
}

// ---------------------------------------------------------------------------
// Corpus-level evaluation

enum class CorpusMetric { bleu, chrf1, chrf2, chrf3 };

struct CorpusScore {
  std::string name;
  std::string signature;
  double value = 0.0;
};

CorpusMetric parse_corpus_metric(std::string_view name);
std::string_view to_string(CorpusMetric metric);
std::string corpus_signature(CorpusMetric metric);

/// Corpus BLEU (13a, exp smoothing, one reference) or corpus chrF_beta.
/// Throws std::invalid_argument on empty or misaligned inputs.
CorpusScore corpus_score(std::span<const std::string> hyps, std::span<const std::string> refs,
                         CorpusMetric metric);

std::vector<CorpusScore> corpus_scores(std::span<const std::string> hyps,
                                       std::span<const std::string> refs,
                                       std::span<const CorpusMetric> metrics);

}  // namespace mbrkit
