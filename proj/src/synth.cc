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

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpsynth/mechanism.h"

namespace dpsynth {

ValidationReport ValidateParams(const PipelineConfig& config, std::size_t n,
                                std::size_t family_size) {
  ValidationReport v;
  const double delta = config.delta_target;
  const double gamma = config.gamma;
  if (config.validate_accuracy) {
    if (!(delta > 0.0 && delta <= 0.5)) {
      v.config_valid = false;
      v.issues.push_back("delta must lie in (0, 1/2]");
    }
    if (!(gamma > 0.0 && gamma < 0.25)) {
      v.config_valid = false;
      v.issues.push_back("gamma must lie in (0, 1/4)");
    }
  }
  if (config.k < 1 || config.m < 1) {
    v.config_valid = false;
    v.issues.push_back("k and m must be at least 1");
  }

  const double f = static_cast<double>(family_size);
  v.threshold_n_k = std::log(f / gamma) / (delta * delta);
  v.threshold_m = config.kappa_bound * f / gamma / (delta * delta);
  v.accuracy_pass =
      v.config_valid &&
      static_cast<double>(std::min(n, config.k)) >= v.threshold_n_k &&
      static_cast<double>(config.m) >= v.threshold_m;

  v.sigma = config.sigma_override ? *config.sigma_override
                                  : SigmaFor(delta, family_size, gamma);
  v.epsilon_achieved = n > 0 ? SensitivityBound(family_size, n) / v.sigma
                             : std::numeric_limits<double>::infinity();
  if (config.epsilon) {
    const PrivacyCheck check =
        CheckPrivacy(std::max<std::size_t>(n, 1), *config.epsilon, delta,
                     family_size, gamma);
    v.required_n = check.required_n;
    v.privacy_pass = n > 0 && check.pass;
    if (!v.privacy_pass) {
      v.issues.push_back(
          "n below the privacy threshold for the requested epsilon");
    }
  }
  return v;
}

Dataset Bootstrap(const FiniteDensity& h, std::size_t k, Rng& rng) {
  std::vector<double> cumulative(h.size());
  CompensatedSum<double> sum;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sum.Add(h.weights()[static_cast<Eigen::Index>(i)]);
    cumulative[i] = sum.Result();
  }
  Dataset out(h.support().schema());
  out.Reserve(k);
  for (std::size_t draw = 0; draw < k; ++draw) {
    const double target = rng.Uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    auto i = static_cast<std::size_t>(it - cumulative.begin());
    while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;
    out.Add(h.support()[i]);
  }
  return out;
}

Dataset Bootstrap(const FiniteDensity& h, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  return Bootstrap(h, k, rng);
}

NoisyRelease ReleaseStatistics(const QueryFamily& queries,
                               const RecordSource& data, double sigma,
                               std::uint64_t seed) {
  NoisyRelease release;
  release.queries = queries;
  release.n = data.size();
  release.sigma = sigma;
  release.noisy_targets = Perturb(EvaluateAll(queries, data), sigma, seed);
  return release;
}

namespace {

Distribution AlignToSchema(const Distribution& mu, const Schema& schema) {
  if (SchemaOf(mu) == schema) return mu;
  if (const auto* explicit_mu = std::get_if<ExplicitDistribution>(&mu)) {
    if (explicit_mu->schema().dimension() == schema.dimension()) {
      return explicit_mu->WithSchema(schema);
    }
  }
  throw Error("sampling distribution does not match the data schema");
}

std::string JoinReals(const StatisticsVector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += FormatReal(v[i]);
  }
  return out;
}

}  // namespace

GenerateResult Generate(const RecordSource& data, const QueryFamily& queries,
                        const Distribution& mu, const PipelineConfig& config) {
  if (data.size() == 0) throw Error("empty dataset");
  if (config.k < 1 || config.m < 1) throw Error("k and m must be at least 1");
  const Distribution sampling = AlignToSchema(mu, data.schema());

  GenerateResult result;
  const QueryFamily family = WithConstantOne(queries, &result.constant_added);
  family.CheckConforms(data.schema());
  const std::size_t n = data.size();

  result.validation = ValidateParams(config, n, family.size());
  const ValidationReport& v = result.validation;
  if (config.epsilon && !v.privacy_pass && !config.allow_privacy_override) {
    throw PrivacyGateError(
        "privacy gate: n = " + std::to_string(n) +
        " is below required_n = " + FormatReal(v.required_n) +
        " for epsilon = " + FormatReal(*config.epsilon));
  }

  const NoisyRelease release = ReleaseStatistics(
      family, data, v.sigma, DeriveSeed(config.seed, kNoiseStream));

  // Everything below depends on the data only through `release`.
  result.omega_star =
      Sample(sampling, config.m, DeriveSeed(config.seed, kReducedSpaceStream));
  const FitProblem problem =
      BuildLp(release.queries, result.omega_star, release.noisy_targets);
  result.fit = SolveMinMax(problem, config.solver);
  result.synthetic = Bootstrap(result.fit.density, config.k,
                               DeriveSeed(config.seed, kBootstrapStream));

  Report& r = result.report;
  r.Set("seed", static_cast<std::uint64_t>(config.seed));
  r.Set("n", static_cast<std::uint64_t>(n));
  r.Set("k", static_cast<std::uint64_t>(config.k));
  r.Set("m", static_cast<std::uint64_t>(config.m));
  r.Set("delta", config.delta_target);
  r.Set("gamma", config.gamma);
  r.Set("epsilon",
        config.epsilon ? FormatReal(*config.epsilon) : std::string("unset"));
  r.Set("kappa_bound", config.kappa_bound);
  r.Set("family_size", static_cast<std::uint64_t>(family.size()));
  r.Set("constant_added", result.constant_added);
  r.Set("sigma", v.sigma);
  r.Set("sensitivity", SensitivityBound(family.size(), n));
  r.Set("epsilon_achieved", v.epsilon_achieved);
  r.Set("required_n", v.required_n);
  r.Set("privacy_pass", v.privacy_pass);
  r.Set("privacy_override", config.epsilon && !v.privacy_pass);
  r.Set("config_valid", v.config_valid);
  r.Set("accuracy_threshold_n_k", v.threshold_n_k);
  r.Set("accuracy_threshold_m", v.threshold_m);
  r.Set("accuracy_pass", v.accuracy_pass);
  std::string issues;
  for (const auto& issue : v.issues) {
    if (!issues.empty()) issues += "; ";
    issues += issue;
  }
  r.Set("validation_issues", issues.empty() ? std::string("none") : issues);
  r.Set("support_size", static_cast<std::uint64_t>(problem.support.size()));
  r.Set("lp_objective", result.fit.objective);
  r.Set("lp_status", FitStatusName(result.fit.status));
  r.Set("lp_iterations", static_cast<std::uint64_t>(result.fit.iterations));
  if (config.export_noisy_targets) {
    r.Set("noisy_targets", JoinReals(release.noisy_targets));
  }
  return result;
}

}  // namespace dpsynth
