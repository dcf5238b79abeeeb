#include <gtest/gtest.h>

#include <algorithm>

#include "embclf/error.hpp"
#include "embclf/synth.hpp"
#include "oracles.hpp"

namespace embclf {
namespace {

TEST(Synth, SameSeedSameBytes) {
  const auto spec = two_cluster_layout(8, 1.0, 1.0, 50);
  EXPECT_EQ(encode_store(synth_generate(spec, 9)), encode_store(synth_generate(spec, 9)));
  EXPECT_NE(encode_store(synth_generate(spec, 9)), encode_store(synth_generate(spec, 10)));
}

TEST(Synth, ExactSplitCountsPerCluster) {
  auto spec = two_cluster_layout(4, 1.0, 1.0, 1000);
  const auto s = synth_generate(spec, 1);
  EXPECT_EQ(s.size(), 2000u);
  EXPECT_EQ(s.count(Split::train), 1600u);
  EXPECT_EQ(s.count(Split::val), 200u);
  EXPECT_EQ(s.count(Split::test), 200u);
  std::size_t val_pos = 0;
  for (const auto& r : s.subset(Split::val).records()) val_pos += r.label;
  EXPECT_EQ(val_pos, 100u);
}

TEST(Synth, ClusterMeansAreRecovered) {
  const auto s = synth_generate(two_cluster_layout(4, 2.0, 0.5, 4000), 3);
  double sum[2] = {0, 0};
  for (const auto& r : s.records()) sum[r.label] += r.hidden[0];
  EXPECT_NEAR(sum[1] / 4000, 2.0, 0.05);
  EXPECT_NEAR(sum[0] / 4000, -2.0, 0.05);
}

TEST(Synth, Validation) {
  auto spec = two_cluster_layout(4, 1.0, 1.0, 10);
  spec.clusters[0].stddev = 0;
  EXPECT_THROW(synth_generate(spec, 0), ValidationError);
  spec = two_cluster_layout(4, 1.0, 1.0, 10);
  spec.clusters[1].mean.pop_back();
  EXPECT_THROW(synth_generate(spec, 0), ValidationError);
  spec = two_cluster_layout(4, 1.0, 1.0, 10);
  spec.splits = {0.5, 0.5, 0.5};
  EXPECT_THROW(synth_generate(spec, 0), ValidationError);
}

TEST(Synth, XorDefeatsALinearModel) {
  const auto s = synth_generate(xor_layout(8, 2.0, 3.0, 0.5, 500), 4);
  const auto m = oracle::fit_plain_logistic(s, Split::train);
  EXPECT_LT(oracle::plain_logistic_accuracy(m, s, Split::train), 0.9);
}

TEST(Synth, ConfounderGroupsShareContent) {
  const auto spec = confounder_layout(16, 5, 3, 1.0, 1.0, 0.5, 8);
  ASSERT_EQ(spec.clusters.size(), 20u);
  for (std::size_t g = 0; g < 5; ++g) {
    const auto& a = spec.clusters[4 * g];
    const auto& b = spec.clusters[4 * g + 3];
    EXPECT_EQ(a.label, b.label);
    EXPECT_NE(a.label, spec.clusters[4 * g + 1].label);
    for (std::size_t j = 2; j < 16; ++j) EXPECT_EQ(a.mean[j], b.mean[j]);
  }
}

TEST(Perturb, KeepsMetadataAndShiftsByDrift) {
  const auto s = synth_generate(two_cluster_layout(4, 1.0, 1.0, 500), 5);
  const std::vector<double> drift = {3.0, 0.0, 0.0, -1.0};
  const auto p = perturb_gaussian(s, 0.1, 6, drift);
  ASSERT_EQ(p.size(), s.size());
  double mean0 = 0, mean3 = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& a = s.records()[i];
    const auto& b = p.records()[i];
    EXPECT_EQ(a.id, b.id);
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.split, b.split);
    mean0 += b.hidden[0] - a.hidden[0];
    mean3 += b.hidden[3] - a.hidden[3];
  }
  EXPECT_NEAR(mean0 / 1000, 3.0, 0.02);
  EXPECT_NEAR(mean3 / 1000, -1.0, 0.02);
  const auto same = perturb_gaussian(s, 0.0, 1);
  EXPECT_TRUE(std::equal(same.records().begin(), same.records().end(), s.records().begin(), s.records().end()));
  EXPECT_THROW(perturb_gaussian(s, 1.0, 1, std::vector<double>{1.0}), DimensionError);
}

}  // namespace
}  // namespace embclf
