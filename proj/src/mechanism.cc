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

#include "dpsynth/mechanism.h"

#include <cmath>

namespace dpsynth {

double LaplaceFromUniform(double sigma, double u) {
  if (!(sigma > 0.0)) throw Error("laplace: sigma must be positive");
  const double centered = u - 0.5;
  const double sign = centered < 0.0 ? -1.0 : 1.0;
  // log1p keeps precision for draws near the center.
  return -sigma * sign * std::log1p(-2.0 * std::abs(centered));
}

double LaplaceSample(double sigma, Rng& rng) {
  return LaplaceFromUniform(sigma, rng.Uniform());
}

double SensitivityBound(std::size_t family_size, std::size_t n) {
  if (family_size == 0 || n == 0) {
    throw Error("sensitivity: family size and n must be positive");
  }
  return 2.0 * static_cast<double>(family_size) / static_cast<double>(n);
}

double SigmaFor(double delta, std::size_t family_size, double gamma) {
  if (!(delta > 0.0)) throw Error("sigma: delta must be positive");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error("sigma: gamma must be in (0, 1)");
  const double ratio = static_cast<double>(family_size) / gamma;
  if (!(ratio > 1.0)) throw Error("sigma: |F|/gamma must exceed 1");
  return delta / std::log(ratio);
}

PrivacyParams PrivacyParams::Make(double epsilon, double delta_target,
                                  double gamma, std::size_t family_size,
                                  std::size_t n) {
  if (!(epsilon > 0.0)) throw Error("privacy: epsilon must be positive");
  PrivacyParams params;
  params.epsilon = epsilon;
  params.delta_target = delta_target;
  params.gamma = gamma;
  params.family_size = family_size;
  params.n = n;
  params.sigma = SigmaFor(delta_target, family_size, gamma);
  return params;
}

PrivacyCheck CheckPrivacy(std::size_t n, double epsilon, double delta_target,
                          std::size_t family_size, double gamma) {
  if (!(epsilon > 0.0)) throw Error("privacy: epsilon must be positive");
  PrivacyCheck check;
  check.sigma = SigmaFor(delta_target, family_size, gamma);
  check.sensitivity = SensitivityBound(family_size, n);
  check.epsilon_achieved = check.sensitivity / check.sigma;
  const double f = static_cast<double>(family_size);
  check.required_n = std::isinf(epsilon) ? 0.0
                                         : 2.0 * f * std::log(f / gamma) /
                                               (epsilon * delta_target);
  check.pass = static_cast<double>(n) >= check.required_n;
  return check;
}

Report PrivacyReport(const PrivacyCheck& check, double epsilon) {
  Report report;
  report.Set("sigma", check.sigma);
  report.Set("epsilon", epsilon);
  report.Set("sensitivity", check.sensitivity);
  report.Set("required_n", check.required_n);
  return report;
}

StatisticsVector Perturb(const StatisticsVector& stats, double sigma,
                         std::uint64_t seed) {
  if (!(sigma > 0.0)) throw Error("perturb: sigma must be positive");
  StatisticsVector out = stats;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    Rng substream(DeriveSeed(seed, static_cast<std::uint64_t>(j)));
    out[j] += LaplaceSample(sigma, substream);
  }
  return out;
}

}  // namespace dpsynth
