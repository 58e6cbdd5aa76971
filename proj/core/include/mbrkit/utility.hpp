#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mbrkit/metrics.hpp"

namespace mbrkit {

struct ChrfParams {
  double beta = 1.0;
  bool operator==(const ChrfParams&) const = default;
};

/// Token-level unigram F1. Not one of the published presets; kept as a small
/// transparent utility for worked examples and debugging.
struct UnigramF1Params {
  bool operator==(const UnigramF1Params&) const = default;
};

enum class UtilityFamily { bleu, chrf, meteor, unigram_f1 };

/// A utility function u(hypothesis, pseudo-reference) for MBR. Exactly one
/// family's parameters are held; `symmetric` wraps it in the harmonic mean
/// of both argument orders.
struct UtilityConfig {
  std::variant<BleuParams, ChrfParams, MeteorParams, UnigramF1Params> params = ChrfParams{};
  bool symmetric = false;
  /// Only consulted by METEOR. Null means every word is a content word.
  std::shared_ptr<const FunctionWords> function_words;

  UtilityFamily family() const;

  /// Preset name when the parameters match one ("chrf-1", "bleu-floor-symmetric"),
  /// otherwise a descriptive name with explicit parameters.
  std::string name() const;

  /// Human-readable parameter listing, e.g. "family=chrf beta=1 symmetric=false".
  std::string describe() const;
};

/// Resolves a preset: bleu, bleu-floor, bleu-add-k, bleu-exp, chrf-0.5, chrf-1,
/// chrf-2, chrf-3, meteor, meteor-0.5, unigram-f1, each optionally suffixed
/// with "-symmetric". "chrf-<beta>" accepts any positive beta.
/// Throws std::invalid_argument for unknown names.
UtilityConfig utility_preset(std::string_view name);

/// The ten presets of the published utility table, in table order.
const std::vector<std::string>& table_presets();

/// True if the sample yields no material for the utility: no 13a tokens for
/// token-based families, no non-whitespace characters for chrF.
bool is_degenerate(const UtilityConfig& config, std::string_view sample);

/// Direct evaluation of u(hyp, ref), symmetrized when configured. Degenerate
/// inputs score 0 on either side.
double evaluate_utility(const UtilityConfig& config, std::string_view hyp, std::string_view ref);

}  // namespace mbrkit
