#include "pairwise.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace mbrkit::detail {

std::int64_t clipped_overlap(const SparseCounts& a, const SparseCounts& b) {
  std::int64_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      common += std::min(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return common;
}

namespace {

class Interner {
 public:
  std::uint32_t operator()(std::string_view key) {
    auto it = ids_.find(std::string(key));
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(ids_.size());
    ids_.emplace(std::string(key), id);
    return id;
  }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
};

SparseCounts to_sparse(const std::vector<std::uint32_t>& ids) {
  std::map<std::uint32_t, std::int64_t> counts;
  for (auto id : ids) ++counts[id];
  return {counts.begin(), counts.end()};
}

}  // namespace

PairwiseScorer::PairwiseScorer(std::span<const std::string> samples, const UtilityConfig& config)
    : config_(config), samples_(samples.size()) {
  switch (config.family()) {
    case UtilityFamily::chrf:
      build_chrf(samples);
      break;
    case UtilityFamily::bleu:
      build_tokens(samples, kWordNGramOrder);
      break;
    case UtilityFamily::meteor:
    case UtilityFamily::unigram_f1:
      build_tokens(samples, 1);
      break;
  }
}

void PairwiseScorer::build_chrf(std::span<const std::string> samples) {
  Interner intern;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    Sample& out = samples_[s];
    const std::string kept = utf8::remove_space(samples[s]);
    std::vector<std::size_t> offsets;
    std::size_t pos = 0;
    while (pos < kept.size()) {
      offsets.push_back(pos);
      utf8::next(kept, pos);
    }
    offsets.push_back(kept.size());
    const std::size_t chars = offsets.size() - 1;
    out.degenerate = chars == 0;
    out.length = static_cast<std::int64_t>(chars);
    for (std::size_t k = 1; k <= static_cast<std::size_t>(kCharNGramOrder); ++k) {
      std::vector<std::uint32_t> ids;
      for (std::size_t start = 0; start + k <= chars; ++start) {
        ids.push_back(intern(std::string_view(kept).substr(offsets[start],
                                                            offsets[start + k] - offsets[start])));
      }
      out.totals[k - 1] = static_cast<std::int64_t>(ids.size());
      out.orders[k - 1] = to_sparse(ids);
    }
  }
}

void PairwiseScorer::build_tokens(std::span<const std::string> samples, int max_order) {
  Interner words;
  Interner ngrams;
  const FunctionWords* function_words = config_.function_words.get();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    Sample& out = samples_[s];
    const TokenSeq seq = tokenize_13a(samples[s]);
    out.degenerate = seq.empty();
    out.length = static_cast<std::int64_t>(seq.size());
    out.tokens.reserve(seq.size());
    std::vector<std::uint32_t> function_ids;
    for (const auto& t : seq.tokens) {
      out.tokens.push_back(words(t));
      if (function_words != nullptr && function_words->contains(t)) {
        function_ids.push_back(out.tokens.back());
        ++out.function_count;
      }
    }
    out.function_unigrams = to_sparse(function_ids);
    for (std::size_t k = 1; k <= static_cast<std::size_t>(max_order); ++k) {
      std::vector<std::uint32_t> ids;
      std::string key;
      for (std::size_t start = 0; start + k <= out.tokens.size(); ++start) {
        key.assign(reinterpret_cast<const char*>(out.tokens.data() + start),
                   k * sizeof(std::uint32_t));
        ids.push_back(ngrams(key));
      }
      out.totals[k - 1] = static_cast<std::int64_t>(ids.size());
      out.orders[k - 1] = to_sparse(ids);
    }
  }
}

double PairwiseScorer::raw(std::size_t i, std::size_t j) const {
  const Sample& h = samples_[i];
  const Sample& r = samples_[j];
  if (h.degenerate || r.degenerate) return 0.0;

  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ChrfParams>) {
          ChrfStats stats;
          for (std::size_t k = 0; k < static_cast<std::size_t>(kCharNGramOrder); ++k) {
            stats.hyp[k] = h.totals[k];
            stats.ref[k] = r.totals[k];
            stats.match[k] = clipped_overlap(h.orders[k], r.orders[k]);
          }
          return chrf_from_stats(stats, p.beta);
        } else if constexpr (std::is_same_v<P, BleuParams>) {
          BleuStats stats;
          for (std::size_t k = 0; k < static_cast<std::size_t>(kWordNGramOrder); ++k) {
            stats.matches[k] = clipped_overlap(h.orders[k], r.orders[k]);
            stats.totals[k] = h.totals[k];
          }
          stats.hyp_len = h.length;
          stats.ref_len = r.length;
          return bleu_from_stats(stats, p);
        } else if constexpr (std::is_same_v<P, MeteorParams>) {
          const Alignment alignment = align_exact(h.tokens, r.tokens);
          MeteorStats stats;
          stats.matches = alignment.matches;
          stats.chunks = alignment.chunks;
          stats.hyp_function = h.function_count;
          stats.ref_function = r.function_count;
          stats.hyp_content = h.length - h.function_count;
          stats.ref_content = r.length - r.function_count;
          stats.matched_function = clipped_overlap(h.function_unigrams, r.function_unigrams);
          return meteor_from_stats(stats, p);
        } else {
          const auto common = static_cast<double>(clipped_overlap(h.orders[0], r.orders[0]));
          return 2.0 * common / static_cast<double>(h.length + r.length);
        }
      },
      config_.params);
}

}  // namespace mbrkit::detail
