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

// Sup-norm (Chebyshev) fit of a density on the reduced space:
//
//   h* = argmin_h max_f | sum_i f(z_i) h(z_i) - target_f |
//
// over probability vectors h on the distinct points of the reduced space.

#ifndef DPSYNTH_OPTIMIZE_H_
#define DPSYNTH_OPTIMIZE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpsynth/core.h"

namespace dpsynth {

struct FitProblem {
  // Distinct points of the reduced space in first-occurrence order.
  Dataset support;
  // How often each support point occurred in the sampled reduced space.
  std::vector<std::size_t> multiplicity;
  // values(j, i) = f_j(z_i); one row per query, one column per point.
  Eigen::MatrixXd values;
  Eigen::VectorXd targets;
};

enum class FitStatus { kOptimal, kIterationLimit };

struct FitSolution {
  FiniteDensity density;
  // Achieved max_j |(A h)_j - b_j| of the returned density.
  double objective = 0;
  std::int64_t iterations = 0;
  FitStatus status = FitStatus::kOptimal;
};

struct SolverOptions {
  double pivot_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  // Weights in [-clamp, 0) are treated as rounding noise.
  double clamp = 1e-12;
  int degeneracy_limit = 50;
  int refactor_interval = 64;
  // <= 0 selects a bound proportional to the problem size.
  std::int64_t max_iterations = 0;
};

// Materializes the constraint data. Repeated points of `omega_star` share
// one variable.
FitProblem BuildLp(const QueryFamily& queries, const Dataset& omega_star,
                   const StatisticsVector& targets);

FitSolution SolveMinMax(const FitProblem& problem,
                        const SolverOptions& options = {});

// Residual vector A h - b.
Eigen::VectorXd Residuals(const FitProblem& problem, const Eigen::VectorXd& h);

const char* FitStatusName(FitStatus status);

// Debug rendering of A, b and optionally a solution. Not a stable format.
std::string FormatLp(const FitProblem& problem,
                     const FitSolution* solution = nullptr);

}  // namespace dpsynth

#endif  // DPSYNTH_OPTIMIZE_H_
