#include <gtest/gtest.h>

#include <cmath>

#include "embclf/error.hpp"
#include "embclf/metrics.hpp"
#include "embclf/random.hpp"
#include "oracles.hpp"

namespace embclf {
namespace {

struct Set {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

Set random_set(std::uint64_t seed, std::size_t n, int levels) {
  Rng rng(seed);
  Set s;
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = static_cast<std::uint8_t>(rng.below(2));
    // levels > 0 quantizes scores to force ties
    double x = rng.uniform() + 0.3 * y;
    if (levels > 0) x = std::floor(x * levels) / levels;
    s.scores.push_back(x);
    s.labels.push_back(y);
  }
  return s;
}

TEST(Auroc, MatchesPairwiseOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto s = random_set(seed, 50 + seed * 13, seed % 2 ? 4 : 0);
    const auto got = auroc(s.scores, s.labels);
    ASSERT_TRUE(got);
    EXPECT_NEAR(*got, oracle::pairwise_auroc(s.scores, s.labels), 1e-9);
  }
}

TEST(Auroc, AllTiedIsHalf) {
  const std::vector<double> sc(10, 0.3);
  const std::vector<std::uint8_t> y = {0, 1, 0, 1, 1, 0, 0, 1, 1, 1};
  EXPECT_EQ(*auroc(sc, y), 0.5);
}

TEST(Auroc, PerfectAndReversed) {
  const std::vector<double> sc = {0.1, 0.2, 0.8, 0.9};
  EXPECT_EQ(*auroc(sc, std::vector<std::uint8_t>{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(*auroc(sc, std::vector<std::uint8_t>{1, 1, 0, 0}), 0.0);
}

TEST(Auroc, UndefinedForOneClass) {
  const std::vector<double> sc = {0.1, 0.2};
  EXPECT_FALSE(auroc(sc, std::vector<std::uint8_t>{1, 1}));
  EXPECT_FALSE(auroc({}, {}));
}

TEST(Auroc, InvariantUnderMonotoneMaps) {
  const auto s = random_set(99, 300, 0);
  const double base = *auroc(s.scores, s.labels);
  std::vector<double> affine, cubic;
  for (double x : s.scores) {
    affine.push_back(3.5 * x - 2);
    cubic.push_back(x * x * x);
  }
  EXPECT_EQ(*auroc(affine, s.labels), base);
  EXPECT_EQ(*auroc(cubic, s.labels), base);
}

TEST(Evaluate, CountsAndThreshold) {
  const std::vector<Prediction> p = {Prediction::from_score(1, 0.5), Prediction::from_score(2, 0.49),
                                     Prediction::from_score(3, 0.9), Prediction::from_score(4, 0.1)};
  EXPECT_EQ(p[0].hard_label, 1);
  EXPECT_EQ(p[1].hard_label, 0);
  const std::vector<LabeledId> t = {{1, 1}, {2, 1}, {3, 0}, {4, 0}};
  const auto r = evaluate(p, t);
  EXPECT_EQ(r.counts.tp, 1u);
  EXPECT_EQ(r.counts.fn, 1u);
  EXPECT_EQ(r.counts.fp, 1u);
  EXPECT_EQ(r.counts.tn, 1u);
  EXPECT_EQ(r.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 0.5);
}

TEST(Evaluate, MismatchRejected) {
  const std::vector<Prediction> p = {Prediction::from_score(1, 0.5)};
  EXPECT_THROW(evaluate(p, std::vector<LabeledId>{{2, 1}}), ValidationError);
  EXPECT_THROW(evaluate(p, std::vector<LabeledId>{}), ValidationError);
}

TEST(Format, KeyValueAndCsv) {
  MetricReport r;
  r.accuracy = 0.25;
  EXPECT_NE(format_report_kv(r).find("auroc=undefined"), std::string::npos);
  EXPECT_NE(format_report_kv(r, "val_").find("val_accuracy=0.25\n"), std::string::npos);
  const std::vector<Prediction> p = {Prediction::from_score(7, 0.75)};
  EXPECT_EQ(format_predictions_csv(p), "id,score,hard_label\n7,0.75,1\n");
}

}  // namespace
}  // namespace embclf
