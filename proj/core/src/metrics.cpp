#include "mbrkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

namespace mbrkit {

std::string_view to_string(Smoothing smoothing) {
  switch (smoothing) {
    case Smoothing::none:
      return "none";
    case Smoothing::floor:
      return "floor";
    case Smoothing::add_k:
      return "add-k";
    case Smoothing::exp:
      return "exp";
  }
  return "unknown";
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t k = 0; k < matches.size(); ++k) {
    matches[k] += other.matches[k];
    totals[k] += other.totals[k];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats bleu_stats(const TokenSeq& hyp, const TokenSeq& ref) {
  const NGramProfile hp = word_ngrams(hyp, kWordNGramOrder);
  const NGramProfile rp = word_ngrams(ref, kWordNGramOrder);
  BleuStats stats;
  for (int k = 1; k <= kWordNGramOrder; ++k) {
    stats.matches[static_cast<std::size_t>(k - 1)] = clipped_overlap(hp, rp, k);
    stats.totals[static_cast<std::size_t>(k - 1)] = hp.total(k);
  }
  stats.hyp_len = static_cast<std::int64_t>(hyp.size());
  stats.ref_len = static_cast<std::int64_t>(ref.size());
  return stats;
}

double bleu_from_stats(const BleuStats& stats, const BleuParams& params) {
  std::array<double, kWordNGramOrder> precisions{};
  double halving = 1.0;
  int effective = kWordNGramOrder;
  for (int n = 1; n <= kWordNGramOrder; ++n) {
    const auto idx = static_cast<std::size_t>(n - 1);
    double correct = static_cast<double>(stats.matches[idx]);
    double total = static_cast<double>(stats.totals[idx]);
    if (params.smoothing == Smoothing::add_k && n > 1) {
      correct += params.add_k;
      total += params.add_k;
    }
    if (total == 0.0) break;
    if (params.effective_order) effective = n;
    if (correct == 0.0) {
      if (params.smoothing == Smoothing::exp) {
        halving *= 2.0;
        precisions[idx] = 1.0 / (halving * total);
      } else if (params.smoothing == Smoothing::floor) {
        precisions[idx] = params.floor_value / total;
      }
    } else {
      precisions[idx] = correct / total;
    }
  }

  double brevity = 1.0;
  if (stats.hyp_len < stats.ref_len) {
    brevity = stats.hyp_len > 0 ? std::exp(1.0 - static_cast<double>(stats.ref_len) /
                                                     static_cast<double>(stats.hyp_len))
                                : 0.0;
  }

  double log_sum = 0.0;
  for (int n = 0; n < effective; ++n) {
    const double p = precisions[static_cast<std::size_t>(n)];
    if (p <= 0.0) return 0.0;
    log_sum += std::log(p);
  }
  return brevity * std::exp(log_sum / effective);
}

double sentence_bleu(const TokenSeq& hyp, const TokenSeq& ref, const BleuParams& params) {
  if (ref.empty()) throw UndefinedMetric("BLEU is undefined for an empty reference");
  if (hyp.empty()) return 0.0;
  return bleu_from_stats(bleu_stats(hyp, ref), params);
}

double sentence_bleu(const TokenSeq& hyp, const TokenSeq& ref, Smoothing smoothing) {
  BleuParams params;
  params.smoothing = smoothing;
  return sentence_bleu(hyp, ref, params);
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  for (std::size_t k = 0; k < hyp.size(); ++k) {
    hyp[k] += other.hyp[k];
    ref[k] += other.ref[k];
    match[k] += other.match[k];
  }
  return *this;
}

ChrfStats chrf_stats(const NGramProfile& hyp, const NGramProfile& ref) {
  ChrfStats stats;
  const int orders = std::min({hyp.max_order(), ref.max_order(), kCharNGramOrder});
  for (int k = 1; k <= orders; ++k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    stats.hyp[idx] = hyp.total(k);
    stats.ref[idx] = ref.total(k);
    stats.match[idx] = clipped_overlap(hyp, ref, k);
  }
  return stats;
}

double chrf_from_stats(const ChrfStats& stats, double beta) {
  double precision = 0.0;
  double recall = 0.0;
  int effective = 0;
  for (std::size_t k = 0; k < stats.hyp.size(); ++k) {
    if (stats.hyp[k] > 0 && stats.ref[k] > 0) {
      precision += static_cast<double>(stats.match[k]) / static_cast<double>(stats.hyp[k]);
      recall += static_cast<double>(stats.match[k]) / static_cast<double>(stats.ref[k]);
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  precision /= effective;
  recall /= effective;
  if (precision + recall == 0.0) return 0.0;
  const double beta2 = beta * beta;
  double score = (1.0 + beta2) * (precision * recall);
  score /= (beta2 * precision) + recall;
  return score;
}

double sentence_chrf(std::string_view hyp, std::string_view ref, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("chrF beta must be positive");
  const NGramProfile rp = char_ngrams(ref, kCharNGramOrder, false);
  if (rp.total(1) == 0) throw UndefinedMetric("chrF is undefined for an empty reference");
  const NGramProfile hp = char_ngrams(hyp, kCharNGramOrder, false);
  return chrf_from_stats(chrf_stats(hp, rp), beta);
}

FunctionWords FunctionWords::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open function-word lexicon: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = utf8::rstrip(line);
    std::size_t start = 0;
    while (start < view.size() && (view[start] == ' ' || view[start] == '\t')) ++start;
    view.remove_prefix(start);
    if (!view.empty()) words.emplace(view);
  }
  return FunctionWords(std::move(words));
}

namespace {

class ChunkSearch {
 public:
  ChunkSearch(std::span<const std::uint32_t> hyp, std::span<const std::uint32_t> ref,
              std::size_t budget)
      : hyp_(hyp), ref_(ref), budget_(budget), used_(ref.size(), false) {
    for (std::size_t j = 0; j < ref.size(); ++j) ref_positions_[ref[j]].push_back(j);
    std::unordered_map<std::uint32_t, std::int64_t> hyp_counts;
    for (auto id : hyp) ++hyp_counts[id];
    for (auto& [id, count] : hyp_counts) {
      auto it = ref_positions_.find(id);
      const std::int64_t need = it == ref_positions_.end()
                                    ? 0
                                    : std::min<std::int64_t>(count, static_cast<std::int64_t>(it->second.size()));
      need_[id] = need;
      target_ += need;
      remaining_[id] = count;
    }
  }

  Alignment run() {
    Alignment result;
    result.matches = target_;
    if (target_ == 0) return result;
    search(0, kNone, 0, 0);
    result.chunks = best_;
    result.exhaustive = nodes_ <= budget_;
    return result;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void search(std::size_t i, std::size_t prev_j, std::int64_t chunks, std::int64_t matched) {
    if (chunks >= best_) return;
    if (++nodes_ > budget_ && best_ != kUnset) return;
    if (i == hyp_.size()) {
      if (matched == target_) best_ = chunks;
      return;
    }
    const std::uint32_t id = hyp_[i];
    std::int64_t& aligned = aligned_[id];
    std::int64_t& remaining = remaining_[id];
    const std::int64_t need = need_[id];

    --remaining;
    if (aligned < need) {
      const auto& positions = ref_positions_[id];
      const std::size_t continuing = prev_j == kNone ? kNone : prev_j + 1;
      auto try_align = [&](std::size_t j) {
        used_[j] = true;
        ++aligned;
        search(i + 1, j, chunks + (j == continuing ? 0 : 1), matched + 1);
        --aligned;
        used_[j] = false;
      };
      if (continuing < ref_.size() && ref_[continuing] == id && !used_[continuing]) {
        try_align(continuing);
      }
      for (std::size_t j : positions) {
        if (j != continuing && !used_[j]) try_align(j);
      }
    }
    // Leaving this occurrence unaligned is allowed only if later occurrences
    // can still fill the quota for its type.
    if (aligned + remaining >= need) search(i + 1, kNone, chunks, matched);
    ++remaining;
  }

  static constexpr std::int64_t kUnset = std::numeric_limits<std::int64_t>::max();

  std::span<const std::uint32_t> hyp_;
  std::span<const std::uint32_t> ref_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  std::vector<bool> used_;
  std::unordered_map<std::uint32_t, std::vector<std::size_t>> ref_positions_;
  std::unordered_map<std::uint32_t, std::int64_t> need_;
  std::unordered_map<std::uint32_t, std::int64_t> aligned_;
  std::unordered_map<std::uint32_t, std::int64_t> remaining_;
  std::int64_t target_ = 0;
  std::int64_t best_ = kUnset;
};

}  // namespace

Alignment align_exact(std::span<const std::uint32_t> hyp, std::span<const std::uint32_t> ref,
                      std::size_t node_budget) {
  return ChunkSearch(hyp, ref, node_budget).run();
}

MeteorStats meteor_stats(const TokenSeq& hyp, const TokenSeq& ref,
                         const FunctionWords* function_words) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  auto intern = [&](const std::vector<std::string>& tokens) {
    std::vector<std::uint32_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
      auto [it, inserted] = ids.try_emplace(t, static_cast<std::uint32_t>(ids.size()));
      out.push_back(it->second);
    }
    return out;
  };
  const auto hyp_ids = intern(hyp.tokens);
  const auto ref_ids = intern(ref.tokens);

  MeteorStats stats;
  const Alignment alignment = align_exact(hyp_ids, ref_ids);
  stats.matches = alignment.matches;
  stats.chunks = alignment.chunks;

  auto is_function = [&](const std::string& t) {
    return function_words != nullptr && function_words->contains(t);
  };
  std::unordered_map<std::string_view, std::int64_t> hyp_function_counts;
  std::unordered_map<std::string_view, std::int64_t> ref_function_counts;
  for (const auto& t : hyp.tokens) {
    if (is_function(t)) {
      ++stats.hyp_function;
      ++hyp_function_counts[t];
    }
  }
  for (const auto& t : ref.tokens) {
    if (is_function(t)) {
      ++stats.ref_function;
      ++ref_function_counts[t];
    }
  }
  stats.hyp_content = static_cast<std::int64_t>(hyp.size()) - stats.hyp_function;
  stats.ref_content = static_cast<std::int64_t>(ref.size()) - stats.ref_function;
  for (const auto& [word, count] : hyp_function_counts) {
    auto it = ref_function_counts.find(word);
    if (it != ref_function_counts.end()) stats.matched_function += std::min(count, it->second);
  }
  return stats;
}

double meteor_from_stats(const MeteorStats& stats, const MeteorParams& params) {
  if (stats.matches == 0) return 0.0;
  const double delta = params.delta;
  const auto matched_function = static_cast<double>(stats.matched_function);
  const auto matched_content = static_cast<double>(stats.matches - stats.matched_function);
  const double weighted = delta * matched_content + (1 - delta) * matched_function;
  const double p_den = delta * static_cast<double>(stats.hyp_content) +
                       (1 - delta) * static_cast<double>(stats.hyp_function);
  const double r_den = delta * static_cast<double>(stats.ref_content) +
                       (1 - delta) * static_cast<double>(stats.ref_function);
  const double precision = p_den > 0 ? weighted / p_den : 0.0;
  const double recall = r_den > 0 ? weighted / r_den : 0.0;
  if (precision <= 0.0 || recall <= 0.0) return 0.0;
  const double alpha = params.alpha;
  const double fmean = precision * recall / (alpha * precision + (1 - alpha) * recall);
  const double penalty =
      params.gamma * std::pow(static_cast<double>(stats.chunks) / static_cast<double>(stats.matches),
                              params.beta);
  return fmean * (1 - penalty);
}

double sentence_meteor(const TokenSeq& hyp, const TokenSeq& ref, const MeteorParams& params,
                       const FunctionWords* function_words) {
  if (ref.empty()) throw UndefinedMetric("METEOR is undefined for an empty reference");
  if (hyp.empty()) return 0.0;
  return meteor_from_stats(meteor_stats(hyp, ref, function_words), params);
}

double unigram_f1(const TokenSeq& hyp, const TokenSeq& ref) {
  if (ref.empty()) throw UndefinedMetric("unigram F1 is undefined for an empty reference");
  if (hyp.empty()) return 0.0;
  const NGramProfile hp = word_ngrams(hyp, 1);
  const NGramProfile rp = word_ngrams(ref, 1);
  const auto common = static_cast<double>(clipped_overlap(hp, rp, 1));
  return 2.0 * common / static_cast<double>(hyp.size() + ref.size());
}

double harmonic_mean(double x, double y) {
  if (x <= 0.0 || y <= 0.0) return 0.0;
  return 2.0 * x * y / (x + y);
}

CorpusMetric parse_corpus_metric(std::string_view name) {
  if (name == "bleu" || name == "BLEU") return CorpusMetric::bleu;
  if (name == "chrf1" || name == "chrF1") return CorpusMetric::chrf1;
  if (name == "chrf2" || name == "chrF2" || name == "chrf") return CorpusMetric::chrf2;
  if (name == "chrf3" || name == "chrF3") return CorpusMetric::chrf3;
  throw std::invalid_argument("unknown evaluation metric '" + std::string(name) +
                              "' (expected bleu, chrf1, chrf2 or chrf3)");
}

std::string_view to_string(CorpusMetric metric) {
  switch (metric) {
    case CorpusMetric::bleu:
      return "BLEU";
    case CorpusMetric::chrf1:
      return "chrF1";
    case CorpusMetric::chrf2:
      return "chrF2";
    case CorpusMetric::chrf3:
      return "chrF3";
  }
  return "unknown";
}

std::string corpus_signature(CorpusMetric metric) {
  if (metric == CorpusMetric::bleu) return "BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a";
  return std::string(to_string(metric)) + "+numchars.6+space.false";
}

CorpusScore corpus_score(std::span<const std::string> hyps, std::span<const std::string> refs,
                         CorpusMetric metric) {
  if (hyps.size() != refs.size()) {
    throw std::invalid_argument("corpus length mismatch: " + std::to_string(hyps.size()) +
                                " hypotheses vs " + std::to_string(refs.size()) + " references");
  }
  if (hyps.empty()) throw std::invalid_argument("cannot score an empty corpus");

  CorpusScore score{std::string(to_string(metric)), corpus_signature(metric), 0.0};
  if (metric == CorpusMetric::bleu) {
    BleuStats total;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      total += bleu_stats(tokenize_13a(utf8::rstrip(hyps[i])), tokenize_13a(utf8::rstrip(refs[i])));
    }
    BleuParams params;
    params.smoothing = Smoothing::exp;
    params.effective_order = false;
    score.value = bleu_from_stats(total, params);
  } else {
    const double beta = metric == CorpusMetric::chrf1 ? 1.0 : metric == CorpusMetric::chrf2 ? 2.0 : 3.0;
    ChrfStats total;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      total += chrf_stats(char_ngrams(hyps[i]), char_ngrams(refs[i]));
    }
    score.value = chrf_from_stats(total, beta);
  }
  return score;
}

std::vector<CorpusScore> corpus_scores(std::span<const std::string> hyps,
                                       std::span<const std::string> refs,
                                       std::span<const CorpusMetric> metrics) {
  std::vector<CorpusScore> out;
  out.reserve(metrics.size());
  for (CorpusMetric m : metrics) out.push_back(corpus_score(hyps, refs, m));
  return out;
}

}  // namespace mbrkit
