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

// Distributions over finite categorical domains: the sampling distribution
// mu used to draw the reduced space, and (in the audit harness) population
// distributions nu with exact mass queries. Also the Renyi condition number
//
//   kappa(nu || mu) = sum_x nu(x)^2 / mu(x) = E_{X ~ nu} (dnu/dmu)(X),
//
// the exponential of the order-2 Renyi divergence.

#ifndef DPSYNTH_DISTRIBUTIONS_H_
#define DPSYNTH_DISTRIBUTIONS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dpsynth/core.h"
#include "dpsynth/random.h"

namespace dpsynth {

// Independent coordinates; coordinate i takes value c with probability
// probabilities(i)[c].
class ProductDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit ProductDistribution(std::vector<std::vector<double>> probabilities);

  static ProductDistribution Uniform(const Schema& schema);

  const Schema& schema() const { return schema_; }
  const std::vector<double>& probabilities(int coordinate) const {
    return probabilities_[coordinate];
  }

  double Mass(const DataPoint& x) const;
  DataPoint Draw(Rng& rng) const;
  // Reuses the storage of `out`.
  void DrawInto(Rng& rng, DataPoint& out) const;

 private:
  Schema schema_;
  std::vector<std::vector<double>> probabilities_;
  std::vector<std::vector<double>> cumulative_;
};

// Enumerated distinct points with a mass each.
class ExplicitDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  ExplicitDistribution(Schema schema, std::vector<DataPoint> points,
                       std::vector<double> masses);
  // Schema inferred as (max value + 1) per coordinate.
  ExplicitDistribution(std::vector<DataPoint> points,
                       std::vector<double> masses);

  // Uniform over every point of `schema` (domain must be enumerable).
  static ExplicitDistribution Uniform(const Schema& schema);

  const Schema& schema() const { return schema_; }
  const std::vector<DataPoint>& points() const { return points_; }
  const std::vector<double>& masses() const { return masses_; }

  double Mass(const DataPoint& x) const;
  DataPoint Draw(Rng& rng) const;
  void DrawInto(Rng& rng, DataPoint& out) const;

  // Same points and masses over a wider schema; throws if a point does not
  // conform.
  ExplicitDistribution WithSchema(Schema schema) const;

 private:
  Schema schema_;
  std::vector<DataPoint> points_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
  std::unordered_map<DataPoint, std::size_t, DataPointHash> index_;
};

using Distribution = std::variant<ProductDistribution, ExplicitDistribution>;

const Schema& SchemaOf(const Distribution& dist);
double Mass(const Distribution& dist, const DataPoint& x);

// `count` i.i.d. draws; repetitions are kept.
Dataset Sample(const Distribution& dist, std::size_t count, Rng& rng);
Dataset Sample(const Distribution& dist, std::size_t count, std::uint64_t seed);

// (dnu/dmu)(x) as a mass ratio; zero where both masses vanish. Throws
// "nu not dominated by mu" where mu(x) = 0 < nu(x).
double DensityRatio(const Distribution& nu, const Distribution& mu,
                    const DataPoint& x);

// Exact kappa(nu || mu). Product pairs are computed coordinatewise in log
// space; a product nu against an explicit mu is enumerated.
double RenyiConditionNumber(const Distribution& nu, const Distribution& mu);

// Monte-Carlo average of (dnu/dmu)(X) over `samples` draws X ~ nu.
double RenyiConditionNumberMonteCarlo(const Distribution& nu,
                                      const Distribution& mu,
                                      std::size_t samples, std::uint64_t seed);

// |Omega| * sum_x phi(x)^2: the condition number against the uniform
// measure on a domain of `domain_size` points.
double KappaUniform(const ExplicitDistribution& phi, std::uint64_t domain_size);

// Exact <f, nu> = E_{X ~ nu} f(X).
double Expectation(const TestFunction& f, const Distribution& nu);
StatisticsVector ExactStatistics(const QueryFamily& queries,
                                 const Distribution& nu);

// Text format, either
//
//   product
//   0.5,0.5          <- one probability vector per coordinate
//
// or
//
//   explicit
//   0,1;0.25         <- point;mass
//
// Blank lines and '#' comments are ignored.
Distribution ParseDistributionSpec(std::string_view text);

}  // namespace dpsynth

#endif  // DPSYNTH_DISTRIBUTIONS_H_
