#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mbrkit/metrics.hpp"
#include "test_data.hpp"

using namespace mbrkit;

namespace {

constexpr double kTol = 1e-9;

TokenSeq seq(std::vector<std::string> tokens) {
  TokenSeq s;
  s.tokens = std::move(tokens);
  s.source_text = s.joined();
  return s;
}

const FunctionWords& lexicon() {
  static const FunctionWords fw = FunctionWords::load(fixtures::data_path("function_words.txt"));
  return fw;
}

}  // namespace

TEST(SentenceBleu, Identity) {
  const auto s = seq({"a", "b", "c", "d"});
  for (auto sm : {Smoothing::none, Smoothing::floor, Smoothing::add_k, Smoothing::exp}) {
    EXPECT_NEAR(sentence_bleu(s, s, sm), 1.0, 1e-12) << to_string(sm);
  }
}

TEST(SentenceBleu, UnsmoothedZeroFourGram) {
  EXPECT_EQ(sentence_bleu(seq({"a", "b", "c", "e"}), seq({"a", "b", "c", "d"}), Smoothing::none), 0.0);
}

TEST(SentenceBleu, FloorHandValue) {
  const double expected =
      std::exp((std::log(3.0 / 4) + std::log(2.0 / 3) + std::log(1.0 / 2) + std::log(0.1)) / 4);
  const double got = sentence_bleu(seq({"a", "b", "c", "e"}), seq({"a", "b", "c", "d"}), Smoothing::floor);
  EXPECT_GT(got, 0.0);
  EXPECT_NEAR(got, expected, 1e-12);
}

TEST(SentenceBleu, EmptyInputs) {
  EXPECT_THROW(sentence_bleu(seq({"a"}), seq({})), UndefinedMetric);
  EXPECT_EQ(sentence_bleu(seq({}), seq({"a"})), 0.0);
}

TEST(SentenceBleu, SmoothedPositiveWithUnigramMatch) {
  const auto h = seq({"x", "a", "y", "z", "w"});
  const auto r = seq({"a", "q", "r", "s"});
  EXPECT_EQ(sentence_bleu(h, r, Smoothing::none), 0.0);
  EXPECT_GT(sentence_bleu(h, r, Smoothing::floor), 0.0);
  EXPECT_GT(sentence_bleu(h, r, Smoothing::add_k), 0.0);
  EXPECT_GT(sentence_bleu(h, r, Smoothing::exp), 0.0);
}

TEST(SentenceChrf, Examples) {
  EXPECT_DOUBLE_EQ(sentence_chrf("cat", "cat", 2.0), 1.0);
  EXPECT_EQ(sentence_chrf("xyz", "abc", 2.0), 0.0);
  EXPECT_EQ(sentence_chrf("", "abc", 2.0), 0.0);
  EXPECT_THROW(sentence_chrf("abc", "", 2.0), UndefinedMetric);
  EXPECT_THROW(sentence_chrf("abc", "  ", 2.0), UndefinedMetric);
  EXPECT_THROW(sentence_chrf("abc", "abc", 0.0), std::invalid_argument);
}

TEST(SentenceChrf, CatCatsPrecisionIsOne) {
  const auto stats = chrf_stats(char_ngrams("cat"), char_ngrams("cats"));
  for (int k = 0; k < 3; ++k) EXPECT_EQ(stats.match[k], stats.hyp[k]);
  // orders 1..3 on both sides: P = 1, R = (3/4 + 2/3 + 1/2) / 3
  const double r = (3.0 / 4 + 2.0 / 3 + 1.0 / 2) / 3;
  EXPECT_NEAR(sentence_chrf("cat", "cats", 1.0), 2 * r / (1 + r), 1e-15);
}

TEST(SentenceChrf, RecallWeightingDirection) {
  const std::string h = "cat";
  const std::string r = "cats and dogs";
  double prev = sentence_chrf(h, r, 0.5);
  for (double beta : {1.0, 2.0, 3.0}) {
    const double cur = sentence_chrf(h, r, beta);
    EXPECT_LT(cur, prev);  // precision above recall here
    prev = cur;
  }
  prev = sentence_chrf(r, h, 0.5);
  for (double beta : {1.0, 2.0, 3.0}) {
    const double cur = sentence_chrf(r, h, beta);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(SentenceChrf, Beta1Symmetry) {
  std::mt19937 gen(3);
  const std::string alphabet = "abcd e";
  for (int trial = 0; trial < 2000; ++trial) {
    auto draw = [&] {
      std::string s(1 + gen() % 10, 'a');
      for (auto& c : s) c = alphabet[gen() % alphabet.size()];
      if (utf8::remove_space(s).empty()) s += 'a';
      return s;
    };
    const auto a = draw();
    const auto b = draw();
    EXPECT_NEAR(sentence_chrf(a, b, 1.0), sentence_chrf(b, a, 1.0), 1e-12) << a << " | " << b;
  }
}

TEST(SentenceMeteor, IdentityFormula) {
  const auto ab = seq({"a", "b"});
  EXPECT_NEAR(sentence_meteor(ab, ab), 1.0 - 0.6 * std::pow(0.5, 0.2), 1e-15);
}

TEST(SentenceMeteor, SwappedPairTwoChunks) {
  const double got = sentence_meteor(seq({"b", "a"}), seq({"a", "b"}));
  EXPECT_NEAR(got, 1.0 - 0.6 * std::pow(1.0, 0.2), 1e-15);
  EXPECT_NEAR(got, 0.4, 1e-15);
}

TEST(SentenceMeteor, DisjointAndEmpty) {
  EXPECT_EQ(sentence_meteor(seq({"x"}), seq({"y"})), 0.0);
  EXPECT_EQ(sentence_meteor(seq({}), seq({"y"})), 0.0);
  EXPECT_THROW(sentence_meteor(seq({"x"}), seq({})), UndefinedMetric);
}

TEST(AlignExact, PrefersFewerChunks) {
  // "a b" can align to either occurrence; the contiguous one gives one chunk.
  const std::vector<std::uint32_t> h{0, 1};
  const std::vector<std::uint32_t> r{0, 2, 0, 1};
  const auto al = align_exact(h, r);
  EXPECT_EQ(al.matches, 2);
  EXPECT_EQ(al.chunks, 1);
  EXPECT_TRUE(al.exhaustive);
}

TEST(AlignExact, BudgetExhaustionStillMaximizesMatches) {
  std::vector<std::uint32_t> h(40);
  std::vector<std::uint32_t> r(40);
  for (std::size_t i = 0; i < 40; ++i) {
    h[i] = static_cast<std::uint32_t>(i % 3);
    r[i] = static_cast<std::uint32_t>((i * 7) % 3);
  }
  const auto al = align_exact(h, r, 1000);
  EXPECT_EQ(al.matches, 40);
  EXPECT_GE(al.chunks, 1);
}

TEST(Symmetrize, HarmonicMean) {
  EXPECT_DOUBLE_EQ(harmonic_mean(0.5, 0.5), 0.5);
  EXPECT_EQ(harmonic_mean(1.0, 0.0), 0.0);
  EXPECT_NEAR(harmonic_mean(0.8, 0.4), 8.0 / 15, 1e-15);
  auto u = [](const std::string& a, const std::string& b) { return sentence_chrf(a, b, 2.0); };
  EXPECT_EQ(symmetrize(u, std::string("cat"), std::string("cats")),
            symmetrize(u, std::string("cats"), std::string("cat")));
}

TEST(Conformance, SentenceMetrics) {
  const auto rows = fixtures::read_jsonl("metric_conformance.jsonl");
  ASSERT_EQ(rows.size(), 30u);
  bool saw_identity = false;
  bool saw_disjoint = false;
  for (const auto& row : rows) {
    const auto hyp = row["hyp"].get<std::string>();
    const auto ref = row["ref"].get<std::string>();
    SCOPED_TRACE(hyp + " ||| " + ref);
    const auto h = tokenize_13a(hyp);
    const auto r = tokenize_13a(ref);

    EXPECT_NEAR(sentence_chrf(hyp, ref, 0.5), row["chrf-0.5"].get<double>(), kTol);
    EXPECT_NEAR(sentence_chrf(hyp, ref, 1.0), row["chrf-1"].get<double>(), kTol);
    EXPECT_NEAR(sentence_chrf(hyp, ref, 2.0), row["chrf-2"].get<double>(), kTol);
    EXPECT_NEAR(sentence_chrf(hyp, ref, 3.0), row["chrf-3"].get<double>(), kTol);
    EXPECT_NEAR(sentence_bleu(h, r, Smoothing::none), row["bleu"].get<double>(), kTol);
    EXPECT_NEAR(sentence_bleu(h, r, Smoothing::floor), row["bleu-floor"].get<double>(), kTol);
    EXPECT_NEAR(sentence_bleu(h, r, Smoothing::add_k), row["bleu-add-k"].get<double>(), kTol);
    EXPECT_NEAR(sentence_bleu(h, r, Smoothing::exp), row["bleu-exp"].get<double>(), kTol);

    const MeteorParams standard;
    const MeteorParams half{.alpha = 0.5};
    EXPECT_NEAR(sentence_meteor(h, r, standard), row["meteor"].get<double>(), kTol);
    EXPECT_NEAR(sentence_meteor(h, r, half), row["meteor-0.5"].get<double>(), kTol);
    EXPECT_NEAR(sentence_meteor(h, r, standard, &lexicon()), row["meteor+fw"].get<double>(), kTol);
    EXPECT_NEAR(sentence_meteor(h, r, half, &lexicon()), row["meteor-0.5+fw"].get<double>(), kTol);

    if (hyp == ref) saw_identity = true;
    if (row["chrf-2"].get<double>() == 0.0) saw_disjoint = true;
  }
  EXPECT_TRUE(saw_identity);
  EXPECT_TRUE(saw_disjoint);
}

TEST(Conformance, CorpusMetrics) {
  const auto data = fixtures::read_json("corpus_conformance.json");
  for (const auto& [label, corpus] : data.items()) {
    SCOPED_TRACE(label);
    const auto hyps = corpus["hyps"].get<std::vector<std::string>>();
    const auto refs = corpus["refs"].get<std::vector<std::string>>();
    for (const char* metric : {"bleu", "chrf1", "chrf2", "chrf3"}) {
      const auto score = corpus_score(hyps, refs, parse_corpus_metric(metric));
      EXPECT_NEAR(score.value, corpus[metric].get<double>(), kTol) << metric;
    }
  }
}

TEST(CorpusScore, IdentityDisjointAndErrors) {
  const std::vector<std::string> a{"the cat sat down", "on the mat today"};
  const std::vector<std::string> b{"xyz", "qqq"};
  for (auto m : {CorpusMetric::bleu, CorpusMetric::chrf1, CorpusMetric::chrf2, CorpusMetric::chrf3}) {
    EXPECT_NEAR(corpus_score(a, a, m).value, 1.0, 1e-12);
  }
  for (auto m : {CorpusMetric::chrf1, CorpusMetric::chrf2, CorpusMetric::chrf3}) {
    EXPECT_EQ(corpus_score(b, a, m).value, 0.0);
  }
  // no 4-grams anywhere: the corpus geometric mean collapses to zero
  const std::vector<std::string> short_lines{"the cat sat", "on the mat"};
  EXPECT_EQ(corpus_score(short_lines, short_lines, CorpusMetric::bleu).value, 0.0);
  EXPECT_THROW(corpus_score(a, std::vector<std::string>{"x"}, CorpusMetric::bleu), std::invalid_argument);
  EXPECT_EQ(corpus_signature(CorpusMetric::bleu), "BLEU+case.mixed+numrefs.1+smooth.exp+tok.13a");
  EXPECT_EQ(corpus_signature(CorpusMetric::chrf2), "chrF2+numchars.6+space.false");
  EXPECT_THROW(parse_corpus_metric("ter"), std::invalid_argument);
}

TEST(FunctionWords, LoadsLexicon) {
  EXPECT_TRUE(lexicon().contains("the"));
  EXPECT_TRUE(lexicon().contains("и"));
  EXPECT_FALSE(lexicon().contains("cat"));
  EXPECT_THROW(FunctionWords::load("/nonexistent/words.txt"), std::runtime_error);
}
