#include "mbrkit/utility.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace mbrkit {

namespace {

constexpr std::string_view kSymmetricSuffix = "-symmetric";

std::string format_number(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

std::string base_name(const UtilityConfig& config) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BleuParams>) {
          const BleuParams defaults;
          const bool standard = p.floor_value == defaults.floor_value && p.add_k == defaults.add_k &&
                                p.effective_order;
          std::string name = p.smoothing == Smoothing::none ? "bleu"
                                                            : "bleu-" + std::string(to_string(p.smoothing));
          if (!standard) {
            name += "(floor=" + format_number(p.floor_value) + ",k=" + format_number(p.add_k) +
                    (p.effective_order ? "" : ",fixed-order") + ")";
          }
          return name;
        } else if constexpr (std::is_same_v<P, ChrfParams>) {
          return "chrf-" + format_number(p.beta);
        } else if constexpr (std::is_same_v<P, MeteorParams>) {
          const MeteorParams standard;
          MeteorParams half = standard;
          half.alpha = 0.5;
          if (p == standard) return "meteor";
          if (p == half) return "meteor-0.5";
          return "meteor(alpha=" + format_number(p.alpha) + ",beta=" + format_number(p.beta) +
                 ",gamma=" + format_number(p.gamma) + ",delta=" + format_number(p.delta) + ")";
        } else {
          return "unigram-f1";
        }
      },
      config.params);
}

}  // namespace

UtilityFamily UtilityConfig::family() const {
  switch (params.index()) {
    case 0:
      return UtilityFamily::bleu;
    case 1:
      return UtilityFamily::chrf;
    case 2:
      return UtilityFamily::meteor;
    default:
      return UtilityFamily::unigram_f1;
  }
}

std::string UtilityConfig::name() const {
  std::string name = base_name(*this);
  if (symmetric) name += kSymmetricSuffix;
  return name;
}

std::string UtilityConfig::describe() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BleuParams>) {
          out << "family=bleu smoothing=" << to_string(p.smoothing) << " floor=" << p.floor_value
              << " add_k=" << p.add_k << " max_order=" << kWordNGramOrder
              << " effective_order=" << (p.effective_order ? "true" : "false") << " tok=13a";
        } else if constexpr (std::is_same_v<P, ChrfParams>) {
          out << "family=chrf beta=" << p.beta << " numchars=" << kCharNGramOrder << " space=false";
        } else if constexpr (std::is_same_v<P, MeteorParams>) {
          out << "family=meteor alpha=" << p.alpha << " beta=" << p.beta << " gamma=" << p.gamma
              << " delta=" << p.delta << " matcher=exact tok=13a function_words="
              << (function_words ? function_words->size() : 0);
        } else {
          out << "family=unigram-f1 tok=13a";
        }
      },
      params);
  out << " symmetric=" << (symmetric ? "true" : "false");
  return out.str();
}

UtilityConfig utility_preset(std::string_view name) {
  UtilityConfig config;
  std::string_view base = name;
  if (base.size() > kSymmetricSuffix.size() && base.ends_with(kSymmetricSuffix)) {
    config.symmetric = true;
    base.remove_suffix(kSymmetricSuffix.size());
  }

  if (base == "bleu") {
    config.params = BleuParams{.smoothing = Smoothing::none};
  } else if (base == "bleu-floor") {
    config.params = BleuParams{.smoothing = Smoothing::floor};
  } else if (base == "bleu-add-k") {
    config.params = BleuParams{.smoothing = Smoothing::add_k};
  } else if (base == "bleu-exp") {
    config.params = BleuParams{.smoothing = Smoothing::exp};
  } else if (base == "meteor") {
    config.params = MeteorParams{};
  } else if (base == "meteor-0.5") {
    config.params = MeteorParams{.alpha = 0.5};
  } else if (base == "unigram-f1") {
    config.params = UnigramF1Params{};
  } else if (base.starts_with("chrf-")) {
    std::string_view number = base.substr(5);
    double beta = 0.0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), beta);
    if (ec != std::errc{} || ptr != number.data() + number.size() || !(beta > 0.0)) {
      throw std::invalid_argument("invalid chrF beta in utility '" + std::string(name) + "'");
    }
    config.params = ChrfParams{beta};
  } else {
    throw std::invalid_argument(
        "unknown utility '" + std::string(name) +
        "' (expected bleu, bleu-floor, bleu-add-k, bleu-exp, chrf-<beta>, meteor, meteor-0.5 or "
        "unigram-f1, optionally with -symmetric)");
  }
  return config;
}

const std::vector<std::string>& table_presets() {
  static const std::vector<std::string> presets = {
      "bleu",   "bleu-floor", "bleu-add-k", "bleu-exp", "chrf-0.5",
      "chrf-1", "chrf-2",     "chrf-3",     "meteor",   "meteor-0.5",
  };
  return presets;
}

bool is_degenerate(const UtilityConfig& config, std::string_view sample) {
  if (config.family() == UtilityFamily::chrf) return utf8::remove_space(sample).empty();
  return tokenize_13a(sample).empty();
}

namespace {

double evaluate_raw(const UtilityConfig& config, std::string_view hyp, std::string_view ref) {
  if (is_degenerate(config, hyp) || is_degenerate(config, ref)) return 0.0;
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ChrfParams>) {
          return sentence_chrf(hyp, ref, p.beta);
        } else {
          const TokenSeq h = tokenize_13a(hyp);
          const TokenSeq r = tokenize_13a(ref);
          if constexpr (std::is_same_v<P, BleuParams>) {
            return sentence_bleu(h, r, p);
          } else if constexpr (std::is_same_v<P, MeteorParams>) {
            return sentence_meteor(h, r, p, config.function_words.get());
          } else {
            return unigram_f1(h, r);
          }
        }
      },
      config.params);
}

}  // namespace

double evaluate_utility(const UtilityConfig& config, std::string_view hyp, std::string_view ref) {
  if (!config.symmetric) return evaluate_raw(config, hyp, ref);
  return harmonic_mean(evaluate_raw(config, hyp, ref), evaluate_raw(config, ref, hyp));
}

}  // namespace mbrkit
