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

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "dpsynth/mechanism.h"
#include "dpsynth/queries.h"
#include "dpsynth/random.h"
#include "dpsynth/synth.h"

namespace dpsynth {
namespace {

void DrawInto(const Distribution& dist, Rng& rng, DataPoint& out) {
  std::visit([&](const auto& d) { d.DrawInto(rng, out); }, dist);
}

std::string JoinReals(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += FormatReal(values[i]);
  }
  return out;
}

}  // namespace

double FailureRateBound(double p, std::size_t trials) {
  return p + 3.0 * std::sqrt(p / static_cast<double>(trials));
}

double Median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

// ---------------------------------------------------------------------------
// Deviation of the empirical measure

DeviationResult DeviationCheckEmpirical(const Distribution& nu,
                                        const QueryFamily& queries,
                                        std::size_t n, double delta,
                                        double gamma, std::size_t trials,
                                        std::uint64_t seed) {
  if (n == 0 || trials == 0) throw Error("need n >= 1 and trials >= 1");
  queries.CheckConforms(SchemaOf(nu));
  const StatisticsVector exact = ExactStatistics(queries, nu);

  DeviationResult result;
  result.threshold_n =
      std::log(static_cast<double>(queries.size()) / gamma) / (delta * delta);
  result.threshold_met = static_cast<double>(n) >= result.threshold_n;
  result.failure_bound = FailureRateBound(gamma, trials);

  std::size_t failures = 0;
  DataPoint x;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(DeriveSeed(seed, t));
    std::vector<CompensatedSum<double>> sums(queries.size());
    for (std::size_t i = 0; i < n; ++i) {
      DrawInto(nu, rng, x);
      for (std::size_t j = 0; j < queries.size(); ++j)
        sums[j].Add(queries[j](x));
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < queries.size(); ++j) {
      const double empirical = sums[j].Result() / static_cast<double>(n);
      worst = std::max(
          worst, std::abs(empirical - exact[static_cast<Eigen::Index>(j)]));
    }
    if (worst > delta) ++failures;
  }
  result.failure_rate =
      static_cast<double>(failures) / static_cast<double>(trials);
  result.pass = result.failure_rate <= result.failure_bound;
  return result;
}

// ---------------------------------------------------------------------------
// Reweighted reduced space

ReweightedMeasure Reweight(const Distribution& nu, const Distribution& mu,
                           const Dataset& z) {
  if (z.empty()) throw Error("reweight: empty reduced space");
  ReweightedMeasure measure;
  measure.support = z;
  measure.weights.resize(static_cast<Eigen::Index>(z.size()));
  const double m = static_cast<double>(z.size());
  CompensatedSum<double> total;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double w = DensityRatio(nu, mu, z[i]) / m;
    measure.weights[static_cast<Eigen::Index>(i)] = w;
    total.Add(w);
  }
  measure.total_mass = total.Result();
  return measure;
}

StatisticsVector ReweightedStatistics(const QueryFamily& queries,
                                      const ReweightedMeasure& measure) {
  StatisticsVector out(static_cast<Eigen::Index>(queries.size()));
  for (std::size_t j = 0; j < queries.size(); ++j) {
    CompensatedSum<double> sum;
    for (std::size_t i = 0; i < measure.support.size(); ++i) {
      sum.Add(queries[j](measure.support[i]) *
              measure.weights[static_cast<Eigen::Index>(i)]);
    }
    out[static_cast<Eigen::Index>(j)] = sum.Result();
  }
  return out;
}

ReweightedDeviationResult ReweightedDeviationCheck(
    const Distribution& nu, const Distribution& mu, const QueryFamily& queries,
    std::size_t m, double delta, double gamma, std::size_t trials,
    std::uint64_t seed) {
  if (m == 0 || trials == 0) throw Error("need m >= 1 and trials >= 1");
  queries.CheckConforms(SchemaOf(mu));
  const StatisticsVector exact = ExactStatistics(queries, nu);

  ReweightedDeviationResult result;
  result.kappa = RenyiConditionNumber(nu, mu);
  result.threshold_m = result.kappa * static_cast<double>(queries.size()) /
                       gamma / (delta * delta);
  result.threshold_met = static_cast<double>(m) >= result.threshold_m;
  result.failure_bound = FailureRateBound(gamma, trials);
  result.mean_r_tolerance =
      3.0 * std::sqrt(result.kappa /
                      (static_cast<double>(m) * static_cast<double>(trials)));

  std::size_t failures = 0;
  CompensatedSum<double> r_sum;
  DataPoint z;
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(DeriveSeed(seed, t));
    std::vector<CompensatedSum<double>> sums(queries.size());
    CompensatedSum<double> r;
    for (std::size_t i = 0; i < m; ++i) {
      DrawInto(mu, rng, z);
      const double w = DensityRatio(nu, mu, z) * inv_m;
      r.Add(w);
      for (std::size_t j = 0; j < queries.size(); ++j)
        sums[j].Add(queries[j](z) * w);
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < queries.size(); ++j) {
      worst = std::max(worst, std::abs(sums[j].Result() -
                                       exact[static_cast<Eigen::Index>(j)]));
    }
    if (worst > delta) ++failures;
    r_sum.Add(r.Result());
  }
  result.failure_rate =
      static_cast<double>(failures) / static_cast<double>(trials);
  result.mean_r = r_sum.Result() / static_cast<double>(trials);
  result.pass = result.failure_rate <= result.failure_bound &&
                std::abs(result.mean_r - 1.0) <= result.mean_r_tolerance;
  return result;
}

// ---------------------------------------------------------------------------
// Laplace maximum

LaplaceBoundResult LaplaceBoundCheck(std::size_t family_size, double delta,
                                     double gamma, std::size_t trials,
                                     std::uint64_t seed) {
  if (trials == 0) throw Error("need trials >= 1");
  const double sigma = SigmaFor(delta, family_size, gamma);
  const StatisticsVector zero =
      StatisticsVector::Zero(static_cast<Eigen::Index>(family_size));
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const StatisticsVector noise = Perturb(zero, sigma, DeriveSeed(seed, t));
    if (noise.cwiseAbs().maxCoeff() > delta) ++failures;
  }
  LaplaceBoundResult result;
  result.failure_rate =
      static_cast<double>(failures) / static_cast<double>(trials);
  result.failure_bound = FailureRateBound(gamma, trials);
  result.pass = result.failure_rate <= result.failure_bound;
  return result;
}

// ---------------------------------------------------------------------------
// Privacy audit

bool AreNeighbors(const Dataset& a, const Dataset& b) {
  if (!(a.schema() == b.schema())) return false;
  const Dataset& small = a.size() <= b.size() ? a : b;
  const Dataset& large = a.size() <= b.size() ? b : a;
  if (large.size() - small.size() > 1) return false;
  std::vector<DataPoint> s(small.begin(), small.end());
  std::vector<DataPoint> l(large.begin(), large.end());
  std::sort(s.begin(), s.end());
  std::sort(l.begin(), l.end());
  return std::includes(l.begin(), l.end(), s.begin(), s.end());
}

std::vector<double> LaplaceQuantileEdges(double center, double sigma,
                                         std::size_t bins) {
  std::vector<double> edges;
  for (std::size_t i = 1; i < bins; ++i) {
    const double q = static_cast<double>(i) / static_cast<double>(bins);
    const double offset = q < 0.5 ? sigma * std::log(2.0 * q)
                                  : -sigma * std::log(2.0 * (1.0 - q));
    edges.push_back(center + offset);
  }
  return edges;
}

PrivacyAuditResult PrivacyAudit(const QueryFamily& queries, double sigma,
                                const Dataset& d1, const Dataset& d2,
                                std::size_t trials, std::size_t bins,
                                std::uint64_t seed, double slack) {
  if (!AreNeighbors(d1, d2)) {
    throw Error("privacy audit: datasets are not neighbors");
  }
  if (!(sigma > 0.0)) throw Error("privacy audit: sigma must be positive");
  if (bins < 1 || trials < 1)
    throw Error("privacy audit: need bins, trials >= 1");
  const std::size_t dims = queries.size();
  double cells = 1.0;
  for (std::size_t j = 0; j < dims; ++j) cells *= static_cast<double>(bins);
  if (cells > 1e7) throw Error("privacy audit: too many histogram cells");

  const StatisticsVector s1 = EvaluateAll(queries, d1);
  const StatisticsVector s2 = EvaluateAll(queries, d2);

  std::vector<std::vector<double>> edges;
  for (std::size_t j = 0; j < dims; ++j) {
    edges.push_back(
        LaplaceQuantileEdges(s1[static_cast<Eigen::Index>(j)], sigma, bins));
  }

  auto histogram = [&](const StatisticsVector& center, std::uint64_t stream) {
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(cells), 0);
    Rng rng(DeriveSeed(seed, stream));
    for (std::size_t t = 0; t < trials; ++t) {
      std::size_t cell = 0;
      for (std::size_t j = 0; j < dims; ++j) {
        const double value =
            center[static_cast<Eigen::Index>(j)] + LaplaceSample(sigma, rng);
        const auto bin = static_cast<std::size_t>(
            std::upper_bound(edges[j].begin(), edges[j].end(), value) -
            edges[j].begin());
        cell = cell * bins + bin;
      }
      ++counts[cell];
    }
    return counts;
  };
  const auto counts1 = histogram(s1, 1);
  const auto counts2 = histogram(s2, 2);

  PrivacyAuditResult result;
  for (std::size_t c = 0; c < counts1.size(); ++c) {
    const std::uint32_t a = counts1[c];
    const std::uint32_t b = counts2[c];
    if (a == 0 || b == 0 || a + b < kMinBinObservations) continue;
    ++result.compared_bins;
    result.epsilon_hat = std::max(
        result.epsilon_hat,
        std::abs(std::log(static_cast<double>(a) / static_cast<double>(b))));
  }
  result.epsilon_theoretical = (s1 - s2).lpNorm<1>() / sigma;
  result.slack = slack;
  result.pass = result.epsilon_hat <= result.epsilon_theoretical + slack;
  return result;
}

// ---------------------------------------------------------------------------
// Boolean end-to-end experiment

BooleanExperimentResult BooleanExperiment(int p, int d, std::size_t n,
                                          std::size_t k, std::size_t m,
                                          double delta, double gamma,
                                          std::size_t trials,
                                          std::uint64_t seed) {
  if (trials == 0) throw Error("need trials >= 1");
  const QueryFamily family = MarginalFamily(p, d, MarginalKind::kMonotone);
  const Distribution uniform = ProductDistribution::Uniform(Schema::Boolean(p));

  PipelineConfig config;
  config.delta_target = delta;
  config.gamma = gamma;
  config.k = k;
  config.m = m;
  config.kappa_bound = 1.0;

  BooleanExperimentResult result;
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = DeriveSeed(seed, t);
    const Dataset x = Sample(uniform, n, DeriveSeed(trial_seed, 0));
    config.seed = DeriveSeed(trial_seed, 1);
    const GenerateResult generated = Generate(x, family, uniform, config);
    if (generated.fit.status != FitStatus::kOptimal) {
      ++result.iteration_limit_trials;
    }
    const double error = AccuracyError(family, x, generated.synthetic);
    result.errors.push_back(error);
    if (error > 8.0 * delta) ++failures;
  }
  result.failure_fraction =
      static_cast<double>(failures) / static_cast<double>(trials);
  result.failure_bound = FailureRateBound(4.0 * gamma, trials);
  result.median_error = Median(result.errors);
  result.pass = result.failure_fraction <= result.failure_bound;
  result.median_within_soft_bound = result.median_error <= 4.0 * delta;
  return result;
}

// ---------------------------------------------------------------------------
// Reports

Report DeviationReport(const DeviationResult& r) {
  Report report;
  report.Set("lemma3_failure_rate", r.failure_rate);
  report.Set("lemma3_failure_bound", r.failure_bound);
  report.Set("lemma3_threshold_n", r.threshold_n);
  report.Set("lemma3_threshold_met", r.threshold_met);
  report.Set("lemma3_pass", r.pass);
  return report;
}

Report ReweightedReport(const ReweightedDeviationResult& r) {
  Report report;
  report.Set("lemma4_failure_rate", r.failure_rate);
  report.Set("lemma4_failure_bound", r.failure_bound);
  report.Set("mean_r", r.mean_r);
  report.Set("mean_r_tolerance", r.mean_r_tolerance);
  report.Set("kappa", r.kappa);
  report.Set("lemma4_threshold_m", r.threshold_m);
  report.Set("lemma4_threshold_met", r.threshold_met);
  report.Set("lemma4_pass", r.pass);
  return report;
}

Report PrivacyAuditReport(const PrivacyAuditResult& r) {
  Report report;
  report.Set("epsilon_hat", r.epsilon_hat);
  report.Set("epsilon_theoretical", r.epsilon_theoretical);
  report.Set("audit_slack", r.slack);
  report.Set("compared_bins", static_cast<std::uint64_t>(r.compared_bins));
  report.Set("dp_pass", r.pass);
  return report;
}

Report BooleanExperimentReport(const BooleanExperimentResult& r) {
  Report report;
  report.Set("corollary_pass", r.pass);
  report.Set("failure_fraction", r.failure_fraction);
  report.Set("failure_bound", r.failure_bound);
  report.Set("median_error", r.median_error);
  report.Set("median_within_soft_bound", r.median_within_soft_bound);
  report.Set("iteration_limit_trials",
             static_cast<std::uint64_t>(r.iteration_limit_trials));
  report.Set("trial_errors", JoinReals(r.errors));
  return report;
}

}  // namespace dpsynth
