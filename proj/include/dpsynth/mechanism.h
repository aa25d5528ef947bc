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

// Laplace mechanism on the vector of linear statistics.
//
// Neighboring datasets differ by adding or removing one record. For a family
// F of functions into [-1, 1] the l1 sensitivity of the statistics vector is
// at most 2|F|/n, so Laplace noise of scale sigma gives (2|F| / (n sigma))-DP.
// With sigma = delta / ln(|F|/gamma) that is at most epsilon exactly when
// n >= 2 |F| ln(|F|/gamma) / (epsilon delta). All logarithms are natural.

#ifndef DPSYNTH_MECHANISM_H_
#define DPSYNTH_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <limits>

#include "dpsynth/core.h"
#include "dpsynth/random.h"
#include "dpsynth/report.h"

namespace dpsynth {

// Inverse-CDF transform of one uniform u in (0, 1):
//   -sigma * sign(u - 1/2) * ln(1 - 2|u - 1/2|).
double LaplaceFromUniform(double sigma, double u);

// One Lap(sigma) draw: P(|X| > t) = exp(-t / sigma).
double LaplaceSample(double sigma, Rng& rng);

// 2|F| / n.
double SensitivityBound(std::size_t family_size, std::size_t n);

// delta / ln(|F| / gamma). Throws unless delta > 0, gamma in (0, 1) and
// |F| / gamma > 1.
double SigmaFor(double delta, std::size_t family_size, double gamma);

struct PrivacyParams {
  double epsilon = std::numeric_limits<double>::infinity();
  double delta_target = 0;
  double gamma = 0;
  double sigma = 0;
  std::size_t family_size = 0;
  std::size_t n = 0;

  // Fills sigma from (delta, |F|, gamma).
  static PrivacyParams Make(double epsilon, double delta_target, double gamma,
                            std::size_t family_size, std::size_t n);
};

struct PrivacyCheck {
  bool pass = false;
  // 2 |F| ln(|F|/gamma) / (epsilon delta); zero for epsilon = infinity.
  double required_n = 0;
  double sensitivity = 0;
  double sigma = 0;
  // sensitivity / sigma, the epsilon actually delivered at this n.
  double epsilon_achieved = 0;
};

PrivacyCheck CheckPrivacy(std::size_t n, double epsilon, double delta_target,
                          std::size_t family_size, double gamma);

// Fields `sigma`, `epsilon`, `sensitivity`, `required_n`.
Report PrivacyReport(const PrivacyCheck& check, double epsilon);

// stats[j] + lambda_j with lambda_j ~ Lap(sigma) i.i.d. Draw j comes from
// its own substream DeriveSeed(seed, j), so it does not depend on how many
// other entries are perturbed. Results are not clipped to [-1, 1].
StatisticsVector Perturb(const StatisticsVector& stats, double sigma,
                         std::uint64_t seed);

}  // namespace dpsynth

#endif  // DPSYNTH_MECHANISM_H_
