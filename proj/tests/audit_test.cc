//
// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpsynth/audit.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dpsynth/mechanism.h"
#include "dpsynth/queries.h"
#include "oracles.h"

namespace dpsynth {
namespace {

ExplicitDistribution TwoPoint(double a) {
  return ExplicitDistribution(Schema({2}), {{0}, {1}}, {a, 1.0 - a});
}

Dataset Zeros(std::size_t count) {
  Dataset d(Schema::Boolean(1));
  for (std::size_t i = 0; i < count; ++i) d.Add({0});
  return d;
}

TEST(HelpersTest, FailureRateBoundAndMedian) {
  EXPECT_NEAR(FailureRateBound(0.1, 500), 0.1 + 3 * std::sqrt(0.1 / 500),
              1e-15);
  EXPECT_EQ(Median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(Median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(Median({}), Error);
}

TEST(ReweightTest, EqualDistributionsGiveUnitMass) {
  const Distribution u = ProductDistribution::Uniform(Schema::Boolean(3));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ReweightedMeasure m = Reweight(u, u, Sample(u, 50, seed));
    EXPECT_NEAR(m.total_mass, 1.0, 1e-12);
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
      EXPECT_NEAR(m.weights[i], 1.0 / 50, 1e-15);
    }
  }
}

TEST(ReweightTest, WeightsAreMassRatios) {
  const Dataset z(Schema({2}), {{0}, {1}, {0}, {0}});
  const ReweightedMeasure m = Reweight(TwoPoint(0.75), TwoPoint(0.5), z);
  EXPECT_NEAR(m.weights[0], 1.5 / 4, 1e-15);
  EXPECT_NEAR(m.weights[1], 0.5 / 4, 1e-15);
  EXPECT_NEAR(m.total_mass, (3 * 1.5 + 0.5) / 4, 1e-15);
  const QueryFamily q(
      {TestFunction::ConstantOne(), TestFunction::Assignment({0}, {0})});
  const Eigen::VectorXd s = ReweightedStatistics(q, m);
  EXPECT_NEAR(s[0], m.total_mass, 1e-15);
  EXPECT_NEAR(s[1], 3 * 1.5 / 4, 1e-15);
}

TEST(DeviationCheckTest, ThresholdSizedSampleMeetsBound) {
  const Distribution nu = ProductDistribution::Uniform(Schema::Boolean(4));
  const QueryFamily q = MarginalFamily(4, 1, MarginalKind::kMonotone);
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(25 * std::log(50.0)));
  ASSERT_EQ(n, 98u);
  const DeviationResult r =
      DeviationCheckEmpirical(nu, q, n, 0.2, 0.1, 500, 31);
  EXPECT_TRUE(r.threshold_met);
  EXPECT_NEAR(r.threshold_n, 25 * std::log(50.0), 1e-9);
  EXPECT_LE(r.failure_rate, 0.1 + 3 * std::sqrt(0.1 / 500));
  EXPECT_TRUE(r.pass);
}

TEST(DeviationCheckTest, LargeDeltaNeverFails) {
  const Distribution nu = ProductDistribution::Uniform(Schema::Boolean(3));
  const QueryFamily q = MarginalFamily(3, 2, MarginalKind::kAssignment);
  EXPECT_EQ(DeviationCheckEmpirical(nu, q, 3, 2.0, 0.1, 200, 2).failure_rate,
            0.0);
}

TEST(DeviationCheckTest, HugeSampleNeverFails) {
  const Distribution nu = ProductDistribution::Uniform(Schema::Boolean(2));
  const QueryFamily q = MarginalFamily(2, 1, MarginalKind::kMonotone);
  EXPECT_EQ(
      DeviationCheckEmpirical(nu, q, 1000000, 0.2, 0.1, 100, 5).failure_rate,
      0.0);
}

TEST(DeviationCheckTest, TinySampleIsFlaggedBelowThreshold) {
  const Distribution nu = ProductDistribution::Uniform(Schema::Boolean(4));
  const QueryFamily q = MarginalFamily(4, 1, MarginalKind::kMonotone);
  const DeviationResult r = DeviationCheckEmpirical(nu, q, 2, 0.2, 0.1, 200, 5);
  EXPECT_FALSE(r.threshold_met);
  EXPECT_GT(r.failure_rate, 0.5);
}

TEST(ReweightedCheckTest, TwoPointAtThreshold) {
  const QueryFamily q(
      {TestFunction::ConstantOne(), TestFunction::Assignment({0}, {0})});
  const std::size_t m =
      static_cast<std::size_t>(std::ceil(25 * 1.25 * 2 / 0.1));
  ASSERT_EQ(m, 625u);
  const ReweightedDeviationResult r = ReweightedDeviationCheck(
      TwoPoint(0.75), TwoPoint(0.5), q, m, 0.2, 0.1, 500, 17);
  EXPECT_NEAR(r.kappa, 1.25, 1e-12);
  EXPECT_NEAR(r.threshold_m, 625.0, 1e-9);
  EXPECT_TRUE(r.threshold_met);
  EXPECT_LE(r.failure_rate, 0.1 + 3 * std::sqrt(0.1 / 500));
  EXPECT_TRUE(r.pass);
}

TEST(ReweightedCheckTest, MeanMassNearOne) {
  const QueryFamily q({TestFunction::ConstantOne()});
  const ReweightedDeviationResult r = ReweightedDeviationCheck(
      TwoPoint(0.75), TwoPoint(0.5), q, 625, 0.2, 0.1, 10000, 4);
  EXPECT_NEAR(r.mean_r, 1.0, 0.01);
}

TEST(ReweightedCheckTest, EqualDistributionsHaveUnitMassEveryTrial) {
  const Distribution u = ProductDistribution::Uniform(Schema::Boolean(3));
  const ReweightedDeviationResult r = ReweightedDeviationCheck(
      u, u, MarginalFamily(3, 1, MarginalKind::kMonotone), 50, 0.2, 0.1, 100,
      6);
  EXPECT_NEAR(r.mean_r, 1.0, 1e-12);
  EXPECT_NEAR(r.kappa, 1.0, 1e-12);
}

TEST(LaplaceBoundCheckTest, FailureRateWithinGamma) {
  const LaplaceBoundResult r = LaplaceBoundCheck(17, 0.2, 0.1, 20000, 3);
  // P(max |lambda| > delta) = 1 - (1 - gamma/|F|)^|F| < gamma.
  const double exact = 1 - std::pow(1 - 0.1 / 17, 17);
  EXPECT_NEAR(r.failure_rate, exact, oracle::ThreeSigma(exact, 20000));
  EXPECT_TRUE(r.pass);
}

TEST(NeighborsTest, AddRemoveOne) {
  const Dataset a(Schema::Boolean(2), {{0, 1}, {1, 1}});
  const Dataset b(Schema::Boolean(2), {{1, 1}, {0, 1}, {0, 0}});
  const Dataset c(Schema::Boolean(2), {{0, 0}, {1, 1}});
  EXPECT_TRUE(AreNeighbors(a, b));
  EXPECT_TRUE(AreNeighbors(b, a));
  EXPECT_TRUE(AreNeighbors(a, a));
  EXPECT_FALSE(AreNeighbors(a, c));  // replacement
  EXPECT_FALSE(AreNeighbors(Zeros(3), Zeros(5)));
}

TEST(QuantileEdgesTest, EqualMassBins) {
  for (std::size_t bins : {2, 5, 40}) {
    const auto edges = LaplaceQuantileEdges(0.3, 0.7, bins);
    ASSERT_EQ(edges.size(), bins - 1);
    std::vector<double> all = {-INFINITY};
    all.insert(all.end(), edges.begin(), edges.end());
    all.push_back(INFINITY);
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
      EXPECT_NEAR(oracle::LaplaceIntervalMass(0.3, 0.7, all[i], all[i + 1]),
                  1.0 / bins, 1e-12);
    }
  }
}

TEST(PrivacyAuditTest, IdenticalDatasetsShowNoLeak) {
  const Dataset d = Zeros(10);
  const QueryFamily q({TestFunction::Monotone({0})});
  const PrivacyAuditResult r = PrivacyAudit(q, 0.1, d, d, 200000, 10, 9);
  EXPECT_EQ(r.epsilon_theoretical, 0.0);
  EXPECT_LE(r.epsilon_hat, 0.05);
  EXPECT_EQ(r.compared_bins, 10u);
  EXPECT_TRUE(r.pass);
}

TEST(PrivacyAuditTest, NeighborLeakIsDetectedAndBounded) {
  Dataset d2 = Zeros(10);
  d2.Add({1});
  const QueryFamily q({TestFunction::Monotone({0})});
  const PrivacyAuditResult r =
      PrivacyAudit(q, 0.1, Zeros(10), d2, 200000, 40, 10);
  EXPECT_NEAR(r.epsilon_theoretical, (1.0 / 11) / 0.1, 1e-12);
  EXPECT_GE(r.epsilon_hat, 0.3 * r.epsilon_theoretical);
  EXPECT_LE(r.epsilon_hat, r.epsilon_theoretical + 0.15);
  EXPECT_TRUE(r.pass);
}

TEST(PrivacyAuditTest, LargeSigmaLeaksAlmostNothing) {
  Dataset d2 = Zeros(10);
  d2.Add({1});
  const QueryFamily q({TestFunction::Monotone({0})});
  const double sigma = 1e3 * SensitivityBound(1, 10);
  const PrivacyAuditResult r =
      PrivacyAudit(q, sigma, Zeros(10), d2, 4000000, 4, 11);
  EXPECT_LE(r.epsilon_theoretical, 0.001);
  EXPECT_LE(r.epsilon_hat, 0.01);
}

TEST(PrivacyAuditTest, RejectsNonNeighbors) {
  const QueryFamily q({TestFunction::Monotone({0})});
  EXPECT_THROW(PrivacyAudit(q, 0.1, Zeros(3), Zeros(5), 100, 4, 1), Error);
}

TEST(BooleanExperimentTest, HugeDeltaTriviallyPasses) {
  const BooleanExperimentResult r =
      BooleanExperiment(4, 1, 30, 30, 40, 2.0, 0.1, 5, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.failure_fraction, 0.0);
  EXPECT_EQ(r.errors.size(), 5u);
}

TEST(BooleanExperimentTest, DegenerateReducedSpaceStillRuns) {
  const BooleanExperimentResult r =
      BooleanExperiment(4, 1, 30, 30, 1, 0.2, 0.1, 5, 1);
  EXPECT_EQ(r.errors.size(), 5u);
  for (double e : r.errors) {
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
  }
}

TEST(BooleanExperimentTest, Deterministic) {
  const BooleanExperimentResult a =
      BooleanExperiment(5, 1, 60, 60, 200, 0.2, 0.1, 3, 8);
  const BooleanExperimentResult b =
      BooleanExperiment(5, 1, 60, 60, 200, 0.2, 0.1, 3, 8);
  EXPECT_EQ(a.errors, b.errors);
  EXPECT_EQ(BooleanExperimentReport(a).Render(),
            BooleanExperimentReport(b).Render());
}

TEST(ReportTest, KeysArePresent) {
  const Report r = PrivacyAuditReport(PrivacyAuditResult{});
  for (const char* key : {"epsilon_hat", "epsilon_theoretical", "audit_slack",
                          "compared_bins", "dp_pass"}) {
    EXPECT_TRUE(r.Get(key).has_value()) << key;
  }
  const Report c = BooleanExperimentReport(BooleanExperimentResult{});
  for (const char* key : {"corollary_pass", "failure_fraction", "failure_bound",
                          "median_error", "median_within_soft_bound"}) {
    EXPECT_TRUE(c.Get(key).has_value()) << key;
  }
}

}  // namespace
}  // namespace dpsynth
