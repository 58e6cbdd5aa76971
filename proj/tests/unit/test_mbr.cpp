#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mbrkit/mbr.hpp"

using namespace mbrkit;

namespace {

SamplePool pool_of(std::vector<std::string> samples, std::optional<std::string> ref = std::nullopt) {
  SamplePool p;
  p.id = "p";
  p.source = "src";
  p.reference = std::move(ref);
  p.samples = std::move(samples);
  return p;
}

const SamplePool& worked_pool() {
  static const SamplePool p = pool_of({"a b", "a b", "a c"});
  return p;
}

std::vector<std::string> random_pool(std::mt19937& gen, std::size_t n) {
  const std::vector<std::string> vocab{"a", "b", "c", "d", ".", "e"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const std::size_t len = gen() % 6;
    for (std::size_t t = 0; t < len; ++t) s += (t ? " " : "") + vocab[gen() % vocab.size()];
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(UtilityMatrix, WorkedUnigramF1) {
  const auto m = utility_matrix(worked_pool(), utility_preset("unigram-f1"));
  const std::vector<double> expected{1, 1, 0.5, 1, 1, 0.5, 0.5, 0.5, 1};
  ASSERT_EQ(m.size(), 3u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(m.values()[i], expected[i]);
}

TEST(UtilityMatrix, SingleSample) {
  const auto m = utility_matrix(pool_of({"the cat"}), utility_preset("chrf-1"));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m(0, 0), 1.0);
}

TEST(UtilityMatrix, DiagonalIsOneForChrfAndBleu) {
  const auto p = pool_of({"the cat sat", "a dog", "x"});
  for (const char* name : {"chrf-1", "chrf-3", "bleu", "bleu-exp", "bleu-floor", "bleu-add-k"}) {
    const auto m = utility_matrix(p, utility_preset(name));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(m(i, i), 1.0, 1e-12) << name;
  }
}

TEST(UtilityMatrix, SymmetricConfigGivesSymmetricMatrix) {
  std::mt19937 gen(5);
  for (const auto& name : table_presets()) {
    const auto m = utility_matrix(random_pool(gen, 7), utility_preset(name + "-symmetric"));
    EXPECT_TRUE(m.is_symmetric()) << name;
  }
}

TEST(UtilityMatrix, EmptySamplesAreZeroAndCounted) {
  const auto m = utility_matrix(pool_of({"a b", "", "a b"}), utility_preset("chrf-1"));
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(m(1, j), 0.0);
    EXPECT_EQ(m(j, 1), 0.0);
  }
  EXPECT_EQ(m.degenerate_cells, 5u);
  EXPECT_EQ(m(0, 2), 1.0);
}

TEST(UtilityMatrix, ScorerMatchesDirectEvaluation) {
  std::mt19937 gen(17);
  std::vector<std::string> presets = table_presets();
  presets.push_back("unigram-f1");
  for (int trial = 0; trial < 40; ++trial) {
    const auto samples = random_pool(gen, 6);
    for (const auto& name : presets) {
      for (const bool sym : {false, true}) {
        const auto cfg = utility_preset(sym ? name + "-symmetric" : name);
        const auto m = utility_matrix(samples, cfg);
        for (std::size_t i = 0; i < samples.size(); ++i) {
          for (std::size_t j = 0; j < samples.size(); ++j) {
            ASSERT_EQ(m(i, j), evaluate_utility(cfg, samples[i], samples[j]))
                << cfg.name() << " [" << samples[i] << "] [" << samples[j] << "]";
          }
        }
      }
    }
  }
}

TEST(UtilityMatrix, ThreadCountDoesNotMatter) {
  std::mt19937 gen(23);
  const auto samples = random_pool(gen, 30);
  const auto cfg = utility_preset("meteor");
  const auto a = utility_matrix(samples, cfg, {1});
  const auto b = utility_matrix(samples, cfg, {4});
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST(ExpectedUtilities, Examples) {
  const auto m = utility_matrix(worked_pool(), utility_preset("unigram-f1"));
  const auto eu = expected_utilities(m);
  EXPECT_DOUBLE_EQ(eu[0], 5.0 / 6);
  EXPECT_DOUBLE_EQ(eu[1], 5.0 / 6);
  EXPECT_DOUBLE_EQ(eu[2], 2.0 / 3);

  for (double v : expected_utilities(UtilityMatrix(4, 1.0))) EXPECT_EQ(v, 1.0);
  UtilityMatrix id(4);
  for (std::size_t i = 0; i < 4; ++i) id(i, i) = 1.0;
  for (double v : expected_utilities(id)) EXPECT_EQ(v, 0.25);
}

TEST(ExpectedUtilities, ExcludeSelf) {
  const auto m = utility_matrix(worked_pool(), utility_preset("unigram-f1"));
  const auto eu = expected_utilities(m, false);
  EXPECT_DOUBLE_EQ(eu[0], 0.75);
  EXPECT_DOUBLE_EQ(eu[2], 0.5);
  EXPECT_EQ(expected_utilities(UtilityMatrix(1, 0.7), false)[0], 0.7);
}

TEST(Decode, WorkedExample) {
  const auto r = decode(worked_pool(), utility_preset("unigram-f1"));
  EXPECT_EQ(r.selected_index, 0u);
  EXPECT_EQ(r.selected_text, "a b");
  EXPECT_EQ(r.num_samples_used, 3u);
  EXPECT_EQ(r.utility_name, "unigram-f1");
  EXPECT_EQ(r.sample_indices, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Decode, IdenticalStrings) {
  const auto r = decode(pool_of({"x y", "x y", "x y"}), utility_preset("chrf-1"));
  EXPECT_EQ(r.selected_index, 0u);
  for (double v : r.expected_utilities) EXPECT_EQ(v, 1.0);
}

TEST(Decode, FullSubsampleEqualsNoSubsample) {
  std::mt19937 gen(31);
  const auto p = pool_of(random_pool(gen, 8));
  const auto cfg = utility_preset("chrf-2");
  auto base = decode(p, cfg);
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    auto sub = decode(p, cfg, {.subsample = 8, .seed = seed});
    sub.seed = base.seed;
    EXPECT_EQ(sub, base);
  }
}

TEST(Decode, SubsampleRange) {
  const auto cfg = utility_preset("chrf-1");
  EXPECT_THROW(decode(worked_pool(), cfg, {.subsample = 0}), std::invalid_argument);
  EXPECT_THROW(decode(worked_pool(), cfg, {.subsample = 4}), std::invalid_argument);
  EXPECT_THROW(decode(pool_of({}), cfg), std::invalid_argument);
}

TEST(Decode, Deterministic) {
  std::mt19937 gen(37);
  const auto p = pool_of(random_pool(gen, 20));
  const auto cfg = utility_preset("bleu-exp");
  const auto a = decode(p, cfg, {.subsample = 7, .seed = 4, .threads = 1});
  const auto b = decode(p, cfg, {.subsample = 7, .seed = 4, .threads = 3});
  EXPECT_EQ(a, b);
}

TEST(Decode, PermutationEquivariance) {
  std::mt19937 gen(41);
  const auto cfg = utility_preset("chrf-1");
  for (int trial = 0; trial < 50; ++trial) {
    auto samples = random_pool(gen, 6);
    std::vector<std::size_t> perm(samples.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<std::string> permuted;
    for (auto i : perm) permuted.push_back(samples[i]);

    const auto a = decode(pool_of(samples), cfg);
    const auto b = decode(pool_of(permuted), cfg);
    for (std::size_t k = 0; k < perm.size(); ++k) {
      EXPECT_EQ(b.expected_utilities[k], a.expected_utilities[perm[k]]);
    }
    const double best = a.expected_utilities[a.selected_index];
    if (std::count(a.expected_utilities.begin(), a.expected_utilities.end(), best) == 1) {
      EXPECT_EQ(a.selected_text, b.selected_text);
    }
  }
}

TEST(Decode, SelfTermLowerBound) {
  const auto p = pool_of({"alpha", "beta", "gamma", "delta", "omega"});
  const auto r = decode(p, utility_preset("chrf-1"));
  for (double v : r.expected_utilities) EXPECT_GE(v, 1.0 / 5);
}

TEST(DecodeCurve, FullGridRepeatsFullDecode) {
  std::mt19937 gen(43);
  const auto p = pool_of(random_pool(gen, 10), "a b c");
  const auto cfg = utility_preset("chrf-1");
  const auto full = decode(p, cfg);
  const auto report = decode_curve(p, cfg, {.grid = {10}, .repetitions = 3, .seed = 5});
  ASSERT_EQ(report.points.size(), 3u);
  for (const auto& pt : report.points) {
    EXPECT_EQ(pt.result.selected_index, full.selected_index);
    EXPECT_EQ(pt.result.expected_utilities, full.expected_utilities);
  }
  ASSERT_EQ(report.summaries.size(), 1u);
  EXPECT_EQ(report.summaries[0].stddev, 0.0);
}

TEST(DecodeCurve, SizeOneReturnsDrawnSample) {
  const auto p = pool_of({"the cat", "a dog", "birds"});
  const auto report = decode_curve(p, utility_preset("chrf-1"), {.grid = {1}, .repetitions = 5, .seed = 2});
  for (const auto& pt : report.points) {
    ASSERT_EQ(pt.result.sample_indices.size(), 1u);
    EXPECT_EQ(pt.result.selected_text, p.samples[pt.result.sample_indices[0]]);
    EXPECT_EQ(pt.result.expected_utilities[0], 1.0);
  }
}

TEST(DecodeCurve, MatchesIndependentSubsampleDecodes) {
  std::mt19937 gen(47);
  const auto p = pool_of(random_pool(gen, 12));
  const auto cfg = utility_preset("meteor");
  const CurveOptions opts{.grid = {2, 5, 9}, .repetitions = 2, .seed = 77};
  const auto report = decode_curve(p, cfg, opts);
  for (const auto& pt : report.points) {
    const auto seed = curve_seed(77, pt.size, pt.rep);
    EXPECT_EQ(pt.result, decode(p, cfg, {.subsample = pt.size, .seed = seed}));
  }
}

TEST(DecodeCurve, ReproducibleAndValidated) {
  const auto cfg = utility_preset("unigram-f1");
  const auto a = decode_curve(worked_pool(), cfg, {.grid = {2}, .repetitions = 4, .seed = 8});
  const auto b = decode_curve(worked_pool(), cfg, {.grid = {2}, .repetitions = 4, .seed = 8});
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].result, b.points[i].result);

  try {
    decode_curve(worked_pool(), cfg, {.grid = {2, 4}, .seed = 1});
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("grid size 4"), std::string::npos);
  }
  EXPECT_THROW(decode_curve(worked_pool(), cfg, {.grid = {}, .seed = 1}), std::invalid_argument);
  EXPECT_THROW(decode_curve(worked_pool(), cfg, {.grid = {1}, .repetitions = 0}), std::invalid_argument);
}

TEST(DecodeCurve, CorpusSummaries) {
  std::vector<SamplePool> pools;
  pools.push_back(pool_of({"the cat sat", "the cat sat down", "a cat"}, "the cat sat"));
  pools.push_back(pool_of({"hello world", "hello there", "hi world"}, "hello world"));
  CurveOptions opts{.grid = {1, 3}, .repetitions = 2, .seed = 3,
                    .metrics = {CorpusMetric::chrf1, CorpusMetric::bleu}};
  const auto report = decode_curve(pools, utility_preset("chrf-1"), opts);
  EXPECT_EQ(report.points.size(), 2u * 2u * 2u);
  ASSERT_EQ(report.summaries.size(), 4u);
  for (const auto& s : report.summaries) {
    ASSERT_EQ(s.values.size(), 2u);
    EXPECT_DOUBLE_EQ(s.mean, (s.values[0] + s.values[1]) / 2);
  }
  EXPECT_EQ(report.summaries[2].stddev, 0.0);  // size 3 is the full pool
}

TEST(Stats, MeanAndSampleStddev) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean(v), 2.5);
  EXPECT_NEAR(sample_stddev(v), std::sqrt(5.0 / 3), 1e-15);
  EXPECT_EQ(sample_stddev(std::vector<double>{0.1, 0.1, 0.1}), 0.0);
  EXPECT_EQ(sample_stddev(std::vector<double>{3}), 0.0);
}

TEST(ArgmaxLowest, TiesWithinRoundingGoLow) {
  const std::vector<double> exact{0.25, 0.5, 0.5};
  EXPECT_EQ(argmax_lowest(exact), 1u);
  const std::vector<double> rounding{0.1, 0.3, 0.1 + 0.2};  // 0.30000000000000004
  EXPECT_EQ(argmax_lowest(rounding), 1u);
  const std::vector<double> clear{0.5, 0.5 + 1e-9};
  EXPECT_EQ(argmax_lowest(clear), 1u);
  EXPECT_THROW(argmax_lowest(std::vector<double>{}), std::invalid_argument);
}
