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

// Monte-Carlo verification of the generator's guarantees on instances where
// the population distribution is known exactly. Every check runs from a
// fixed seed; trial t uses substream DeriveSeed(seed, t).
//
// Pass criteria allow three binomial standard errors above the nominal
// failure probability: rate <= p + 3 sqrt(p / trials).

#ifndef DPSYNTH_AUDIT_H_
#define DPSYNTH_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpsynth/core.h"
#include "dpsynth/distributions.h"
#include "dpsynth/report.h"

namespace dpsynth {

// p + 3 sqrt(p / trials).
double FailureRateBound(double p, std::size_t trials);

// nu'_m = (1/m) sum_i (dnu/dmu)(Z_i) delta_{Z_i}. Not normalized.
struct ReweightedMeasure {
  Dataset support;
  Eigen::VectorXd weights;
  // <1, nu'_m>.
  double total_mass = 0;
};

ReweightedMeasure Reweight(const Distribution& nu, const Distribution& mu,
                           const Dataset& z);

// sum_i f(Z_i) w_i for each f.
StatisticsVector ReweightedStatistics(const QueryFamily& queries,
                                      const ReweightedMeasure& measure);

struct DeviationResult {
  // Fraction of trials with max_f |<f, nu_n> - <f, nu>| > delta.
  double failure_rate = 0;
  // delta^-2 ln(|F|/gamma).
  double threshold_n = 0;
  double failure_bound = 0;
  bool threshold_met = false;
  bool pass = false;
};

// Empirical measure of n i.i.d. draws from nu against the exact statistics
// of nu.
DeviationResult DeviationCheckEmpirical(const Distribution& nu,
                                        const QueryFamily& queries,
                                        std::size_t n, double delta,
                                        double gamma, std::size_t trials,
                                        std::uint64_t seed);

struct ReweightedDeviationResult {
  double failure_rate = 0;
  double mean_r = 0;
  // Exact kappa(nu || mu).
  double kappa = 0;
  // delta^-2 kappa |F| / gamma.
  double threshold_m = 0;
  double failure_bound = 0;
  // 3 sqrt(kappa / (m trials)).
  double mean_r_tolerance = 0;
  bool threshold_met = false;
  bool pass = false;
};

// Importance-reweighted reduced space of m draws from mu against the exact
// statistics of nu.
ReweightedDeviationResult ReweightedDeviationCheck(
    const Distribution& nu, const Distribution& mu, const QueryFamily& queries,
    std::size_t m, double delta, double gamma, std::size_t trials,
    std::uint64_t seed);

struct LaplaceBoundResult {
  // Fraction of trials with max_f |lambda(f)| > sigma ln(|F|/gamma) = delta.
  double failure_rate = 0;
  double failure_bound = 0;
  bool pass = false;
};

LaplaceBoundResult LaplaceBoundCheck(std::size_t family_size, double delta,
                                     double gamma, std::size_t trials,
                                     std::uint64_t seed);

struct PrivacyAuditResult {
  double epsilon_hat = 0;
  // ||L(D1) - L(D2)||_1 / sigma.
  double epsilon_theoretical = 0;
  double slack = 0;
  std::size_t compared_bins = 0;
  bool pass = false;
};

inline constexpr double kDefaultAuditSlack = 0.15;
inline constexpr std::size_t kMinBinObservations = 10;

// Returns the bin edges used per dimension: the interior quantiles
// i / bins (0 < i < bins) of Lap(sigma) centered at `center`, so that every
// bin carries equal mass under the first dataset.
std::vector<double> LaplaceQuantileEdges(double center, double sigma,
                                         std::size_t bins);

// Histogram audit of the noisy-statistics stage on two datasets that are
// equal or differ by adding one record. Outputs are binned per dimension;
// the estimate is max |ln(count1 / count2)| over bins where both counts are
// positive and together reach kMinBinObservations.
PrivacyAuditResult PrivacyAudit(const QueryFamily& queries, double sigma,
                                const Dataset& d1, const Dataset& d2,
                                std::size_t trials, std::size_t bins,
                                std::uint64_t seed,
                                double slack = kDefaultAuditSlack);

// True if the multisets are equal or one is the other plus one record.
bool AreNeighbors(const Dataset& a, const Dataset& b);

struct BooleanExperimentResult {
  std::vector<double> errors;
  // Fraction of trials with error > 8 delta.
  double failure_fraction = 0;
  // 4 gamma + 3 sqrt(4 gamma / trials).
  double failure_bound = 0;
  double median_error = 0;
  bool pass = false;
  // median <= 4 delta.
  bool median_within_soft_bound = false;
  std::size_t iteration_limit_trials = 0;
};

// nu = mu = uniform on {0,1}^p with all monotone marginals of degree <= d.
// Each trial draws X ~ nu^n, runs Generate and records AccuracyError.
BooleanExperimentResult BooleanExperiment(int p, int d, std::size_t n,
                                          std::size_t k, std::size_t m,
                                          double delta, double gamma,
                                          std::size_t trials,
                                          std::uint64_t seed);

double Median(std::vector<double> values);

Report DeviationReport(const DeviationResult& r);
Report ReweightedReport(const ReweightedDeviationResult& r);
Report PrivacyAuditReport(const PrivacyAuditResult& r);
Report BooleanExperimentReport(const BooleanExperimentResult& r);

}  // namespace dpsynth

#endif  // DPSYNTH_AUDIT_H_
