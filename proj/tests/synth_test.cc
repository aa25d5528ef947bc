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

#include "dpsynth/synth.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "dpsynth/mechanism.h"
#include "dpsynth/queries.h"

namespace dpsynth {
namespace {

// Forwards to a dataset and counts how often the records are read.
class CountingSource : public RecordSource {
 public:
  explicit CountingSource(const Dataset& data) : data_(data) {}
  const Schema& schema() const override { return data_.schema(); }
  std::size_t size() const override { return data_.size(); }
  void Scan(const std::function<void(const DataPoint&)>& visit) const override {
    ++scans_;
    data_.Scan(visit);
  }
  int scans() const { return scans_; }

 private:
  const Dataset& data_;
  mutable int scans_ = 0;
};

Dataset RandomBoolean(int p, std::size_t n, std::uint64_t seed) {
  return Sample(ProductDistribution::Uniform(Schema::Boolean(p)), n, seed);
}

PipelineConfig SmallConfig() {
  PipelineConfig c;
  c.delta_target = 0.2;
  c.gamma = 0.1;
  c.k = 200;
  c.m = 300;
  c.seed = 12;
  return c;
}

TEST(ValidateParamsTest, ThresholdExample) {
  PipelineConfig c = SmallConfig();
  c.k = 150;
  c.m = 4250;
  const ValidationReport v = ValidateParams(c, 150, 17);
  EXPECT_NEAR(v.threshold_n_k, 25.0 * std::log(170.0), 1e-9);
  EXPECT_NEAR(v.threshold_n_k, 128.4, 0.05);
  EXPECT_NEAR(v.threshold_m, 4250.0, 1e-9);
  EXPECT_TRUE(v.config_valid);
  EXPECT_TRUE(v.accuracy_pass);
  EXPECT_NEAR(v.sigma, 0.2 / std::log(170.0), 1e-15);

  c.m = 4249;
  EXPECT_FALSE(ValidateParams(c, 150, 17).accuracy_pass);
  c.m = 4250;
  EXPECT_FALSE(ValidateParams(c, 128, 17).accuracy_pass);
}

TEST(ValidateParamsTest, MThresholdAtUnitKappa) {
  PipelineConfig c = SmallConfig();
  c.delta_target = 0.25;
  c.gamma = 0.05;
  c.kappa_bound = 1.0;
  EXPECT_NEAR(ValidateParams(c, 100, 11).threshold_m, 11 / 0.05 / 0.0625, 1e-9);
  c.kappa_bound = 3.0;
  EXPECT_NEAR(ValidateParams(c, 100, 11).threshold_m, 3 * 11 / 0.05 / 0.0625,
              1e-9);
}

TEST(ValidateParamsTest, OutOfRangeDeltaIsReported) {
  PipelineConfig c = SmallConfig();
  c.delta_target = 0.6;
  const ValidationReport v = ValidateParams(c, 1000, 17);
  EXPECT_FALSE(v.config_valid);
  EXPECT_FALSE(v.issues.empty());
  EXPECT_FALSE(v.accuracy_pass);
}

TEST(BootstrapTest, PointMass) {
  const Dataset support(Schema::Boolean(2), {{0, 1}, {1, 1}});
  const Dataset y = Bootstrap(FiniteDensity::PointMass(support, 1), 7, 3);
  ASSERT_EQ(y.size(), 7u);
  for (const auto& x : y) EXPECT_EQ(x, DataPoint({1, 1}));
}

TEST(BootstrapTest, FrequenciesFollowWeights) {
  const Dataset support(Schema::Boolean(1), {{0}, {1}});
  const Dataset y = Bootstrap(FiniteDensity::Uniform(support), 100000, 8);
  double ones = 0;
  for (const auto& x : y) ones += x[0];
  EXPECT_NEAR(ones / 1e5, 0.5, 0.01);
  EXPECT_EQ(Bootstrap(FiniteDensity::Uniform(support), 500, 8),
            Bootstrap(FiniteDensity::Uniform(support), 500, 8));
}

TEST(BootstrapTest, NeverDrawsZeroWeightPoints) {
  const Dataset support(Schema({4}), {{0}, {1}, {2}, {3}});
  Eigen::VectorXd w(4);
  w << 0.0, 0.5, 0.0, 0.5;
  const Dataset y = Bootstrap(FiniteDensity(support, w), 20000, 1);
  for (const auto& x : y) EXPECT_TRUE(x[0] == 1 || x[0] == 3);
}

TEST(GenerateTest, ReadsTheDataExactlyOnce) {
  const Dataset x = RandomBoolean(6, 400, 1);
  CountingSource source(x);
  const GenerateResult r =
      Generate(source, MarginalFamily(6, 2, MarginalKind::kMonotone),
               ProductDistribution::Uniform(Schema::Boolean(6)), SmallConfig());
  EXPECT_EQ(source.scans(), 1);
  EXPECT_EQ(r.synthetic.size(), 200u);
}

TEST(GenerateTest, OutputShapeAndSupport) {
  const Dataset x = RandomBoolean(3, 100, 2);
  PipelineConfig c = SmallConfig();
  c.delta_target = 0.5;
  c.sigma_override = 1e3;
  const QueryFamily q = MarginalFamily(3, 3, MarginalKind::kAssignment);
  const GenerateResult r =
      Generate(x, q, ProductDistribution::Uniform(x.schema()), c);
  EXPECT_EQ(r.synthetic.schema(), x.schema());
  EXPECT_EQ(r.synthetic.size(), c.k);
  const std::set<DataPoint> omega(r.omega_star.begin(), r.omega_star.end());
  for (const auto& y : r.synthetic) EXPECT_TRUE(omega.count(y));
}

TEST(GenerateTest, ZeroNoiseFullSupportIsAccurate) {
  const Schema schema = Schema::Boolean(2);
  Dataset x(schema);
  std::mt19937_64 gen(4);
  for (int i = 0; i < 37; ++i) x.Add(schema.PointAt(gen() % 3));
  PipelineConfig c = SmallConfig();
  c.sigma_override = 1e-12;
  c.k = 100000;
  c.m = 200;
  const QueryFamily q = MarginalFamily(schema, 2, MarginalKind::kAssignment);
  const GenerateResult r =
      Generate(x, q, ProductDistribution::Uniform(schema), c);
  ASSERT_EQ(
      std::set<DataPoint>(r.omega_star.begin(), r.omega_star.end()).size(), 4u);
  EXPECT_LE(r.fit.objective, 1e-6);
  EXPECT_LE(AccuracyError(q, x, r.synthetic), 0.02);
}

TEST(GenerateTest, SameSeedSameOutput) {
  const Dataset x = RandomBoolean(8, 300, 3);
  const QueryFamily q = MarginalFamily(8, 2, MarginalKind::kMonotone);
  const auto mu = ProductDistribution::Uniform(x.schema());
  const GenerateResult a = Generate(x, q, mu, SmallConfig());
  const GenerateResult b = Generate(x, q, mu, SmallConfig());
  EXPECT_EQ(FormatDataset(a.synthetic), FormatDataset(b.synthetic));
  EXPECT_EQ(a.report.Render(), b.report.Render());
  PipelineConfig other = SmallConfig();
  other.seed = 13;
  EXPECT_NE(FormatDataset(Generate(x, q, mu, other).synthetic),
            FormatDataset(a.synthetic));
}

TEST(GenerateTest, SolverSettingsDoNotChangeNoisyTargets) {
  const Dataset x = RandomBoolean(5, 300, 9);
  const QueryFamily q = MarginalFamily(5, 2, MarginalKind::kMonotone);
  const auto mu = ProductDistribution::Uniform(x.schema());
  PipelineConfig a = SmallConfig();
  a.export_noisy_targets = true;
  PipelineConfig b = a;
  b.solver.refactor_interval = 3;
  b.solver.degeneracy_limit = 1;
  EXPECT_EQ(Generate(x, q, mu, a).report.Get("noisy_targets"),
            Generate(x, q, mu, b).report.Get("noisy_targets"));
}

TEST(GenerateTest, ConstantOneCountsTowardFamilySize) {
  const Dataset x = RandomBoolean(4, 200, 5);
  const QueryFamily q(
      {TestFunction::Monotone({0}), TestFunction::Monotone({1})});
  const GenerateResult r =
      Generate(x, q, ProductDistribution::Uniform(x.schema()), SmallConfig());
  EXPECT_TRUE(r.constant_added);
  EXPECT_EQ(r.report.Get("family_size").value(), "3");
  EXPECT_EQ(r.report.Get("sigma").value(), FormatReal(SigmaFor(0.2, 3, 0.1)));
  const double expected_eps = 2.0 * 3 / (200 * SigmaFor(0.2, 3, 0.1));
  EXPECT_EQ(r.report.Get("epsilon_achieved").value(), FormatReal(expected_eps));
}

TEST(GenerateTest, PrivacyGate) {
  const Dataset x = RandomBoolean(4, 200, 6);
  const QueryFamily q = MarginalFamily(4, 1, MarginalKind::kMonotone);
  const auto mu = ProductDistribution::Uniform(x.schema());
  PipelineConfig c = SmallConfig();
  c.epsilon = 0.5;
  EXPECT_THROW(Generate(x, q, mu, c), PrivacyGateError);
  c.allow_privacy_override = true;
  const GenerateResult r = Generate(x, q, mu, c);
  EXPECT_EQ(r.report.Get("privacy_pass").value(), "false");
  EXPECT_EQ(r.report.Get("privacy_override").value(), "true");
  c.epsilon = 100.0;
  c.allow_privacy_override = false;
  EXPECT_EQ(Generate(x, q, mu, c).report.Get("privacy_pass").value(), "true");
}

TEST(GenerateTest, ExplicitMuIsWidenedToDataSchema) {
  const Dataset x(Schema({3, 2}), {{0, 0}, {2, 1}, {1, 1}});
  const ExplicitDistribution mu({{0, 0}, {2, 1}}, {0.5, 0.5});
  PipelineConfig c = SmallConfig();
  c.sigma_override = 0.01;
  const GenerateResult r = Generate(
      x, MarginalFamily(x.schema(), 1, MarginalKind::kAssignment), mu, c);
  EXPECT_EQ(r.synthetic.schema(), x.schema());
}

TEST(GenerateTest, RejectsEmptyData) {
  EXPECT_THROW(
      Generate(Dataset(Schema::Boolean(2)),
               MarginalFamily(2, 1, MarginalKind::kMonotone),
               ProductDistribution::Uniform(Schema::Boolean(2)), SmallConfig()),
      Error);
}

}  // namespace
}  // namespace dpsynth
