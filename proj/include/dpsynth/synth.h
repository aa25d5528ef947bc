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

// The generator pipeline:
//
//   1. noisy targets  b_f = <f, X> + Lap(sigma),  sigma = delta / ln(|F|/gamma)
//   2. reduced space  Omega* = m i.i.d. draws from mu
//   3. h*             = sup-norm fit of b on Omega*
//   4. Y              = k i.i.d. draws from h*
//
// Only step 1 reads the true data; everything after it is post-processing of
// the noisy targets.

#ifndef DPSYNTH_SYNTH_H_
#define DPSYNTH_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpsynth/core.h"
#include "dpsynth/distributions.h"
#include "dpsynth/optimize.h"
#include "dpsynth/random.h"
#include "dpsynth/report.h"

namespace dpsynth {

struct PipelineConfig {
  double delta_target = 0.1;
  double gamma = 0.1;
  // When set, generation fails unless the privacy condition holds (or
  // allow_privacy_override is set). When unset the achieved epsilon is
  // reported.
  std::optional<double> epsilon;
  bool allow_privacy_override = false;
  std::size_t k = 1;
  std::size_t m = 1;
  // Trusted upper bound on kappa(nu || mu).
  double kappa_bound = 1.0;
  std::uint64_t seed = 0;
  // Check delta in (0, 1/2] and gamma in (0, 1/4) as the accuracy
  // guarantee requires.
  bool validate_accuracy = true;
  // Include the (already private) noisy targets in the report.
  bool export_noisy_targets = false;
  // Test hook: replaces the derived sigma.
  std::optional<double> sigma_override;
  SolverOptions solver;
};

struct ValidationReport {
  bool config_valid = true;
  std::vector<std::string> issues;
  bool privacy_pass = true;
  // Zero when no epsilon was requested.
  double required_n = 0;
  double sigma = 0;
  double epsilon_achieved = 0;
  bool accuracy_pass = false;
  // delta^-2 ln(|F|/gamma), required of min(n, k).
  double threshold_n_k = 0;
  // delta^-2 K |F| / gamma, required of m.
  double threshold_m = 0;
};

// Advisory: never throws on failed conditions, only records them.
ValidationReport ValidateParams(const PipelineConfig& config, std::size_t n,
                                std::size_t family_size);

class PrivacyGateError : public Error {
 public:
  using Error::Error;
};

// k i.i.d. draws from h.
Dataset Bootstrap(const FiniteDensity& h, std::size_t k, Rng& rng);
Dataset Bootstrap(const FiniteDensity& h, std::size_t k, std::uint64_t seed);

// Output of the only stage that reads the true data.
struct NoisyRelease {
  QueryFamily queries;
  StatisticsVector noisy_targets;
  std::size_t n = 0;
  double sigma = 0;
};

// One scan of `data`, then Laplace noise per query.
NoisyRelease ReleaseStatistics(const QueryFamily& queries,
                               const RecordSource& data, double sigma,
                               std::uint64_t seed);

struct GenerateResult {
  Dataset synthetic;
  Dataset omega_star;
  FitSolution fit;
  ValidationReport validation;
  Report report;
  bool constant_added = false;
};

// Substream ids derived from PipelineConfig::seed.
inline constexpr std::uint64_t kReducedSpaceStream = 1;
inline constexpr std::uint64_t kNoiseStream = 2;
inline constexpr std::uint64_t kBootstrapStream = 3;

// Runs the full pipeline. The constant-one function is prepended to
// `queries` when missing, before sigma is derived. Throws PrivacyGateError
// when an epsilon is configured, the privacy condition fails and no override
// is set.
GenerateResult Generate(const RecordSource& data, const QueryFamily& queries,
                        const Distribution& mu, const PipelineConfig& config);

}  // namespace dpsynth

#endif  // DPSYNTH_SYNTH_H_
