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

#include "dpsynth/optimize.h"

#include <sstream>
#include <unordered_map>

#include "dpsynth/detail/chebyshev_simplex.h"
#include "dpsynth/report.h"

namespace dpsynth {

FitProblem BuildLp(const QueryFamily& queries, const Dataset& omega_star,
                   const StatisticsVector& targets) {
  if (omega_star.empty()) throw Error("reduced space is empty");
  if (static_cast<std::size_t>(targets.size()) != queries.size()) {
    throw Error("target count differs from family size");
  }
  queries.CheckConforms(omega_star.schema());

  FitProblem problem;
  problem.support = Dataset(omega_star.schema());
  std::unordered_map<DataPoint, std::size_t, DataPointHash> seen;
  for (const auto& z : omega_star) {
    auto [it, inserted] = seen.emplace(z, problem.support.size());
    if (inserted) {
      problem.support.Add(z);
      problem.multiplicity.push_back(1);
    } else {
      ++problem.multiplicity[it->second];
    }
  }

  const auto rows = static_cast<Eigen::Index>(queries.size());
  const auto cols = static_cast<Eigen::Index>(problem.support.size());
  problem.values.resize(rows, cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    const DataPoint& z = problem.support[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < rows; ++j) {
      problem.values(j, i) = queries[static_cast<std::size_t>(j)](z);
    }
  }
  problem.targets = targets;
  return problem;
}

Eigen::VectorXd Residuals(const FitProblem& problem, const Eigen::VectorXd& h) {
  return problem.values * h - problem.targets;
}

FitSolution SolveMinMax(const FitProblem& problem,
                        const SolverOptions& options) {
  if (problem.support.empty()) throw Error("reduced space is empty");
  if (problem.values.cols() !=
          static_cast<Eigen::Index>(problem.support.size()) ||
      problem.values.rows() != problem.targets.size()) {
    throw Error("inconsistent fit problem dimensions");
  }

  detail::ChebyshevSimplexOptions<double> simplex_options;
  simplex_options.pivot_tolerance = options.pivot_tolerance;
  simplex_options.reduced_cost_tolerance = options.optimality_tolerance;
  simplex_options.degeneracy_limit = options.degeneracy_limit;
  simplex_options.refactor_interval = options.refactor_interval;
  simplex_options.max_iterations = options.max_iterations;
  auto result = detail::ChebyshevSimplex<double>(
                    problem.values, problem.targets, simplex_options)
                    .Solve();

  Eigen::VectorXd h = result.weights.cwiseMax(0.0);
  CompensatedSum<double> total;
  for (Eigen::Index i = 0; i < h.size(); ++i) total.Add(h[i]);
  if (!(total.Result() > 0.0)) {
    throw Error("solver returned an empty density");
  }
  h /= total.Result();

  FitSolution solution{
      FiniteDensity(problem.support, h), 0.0, result.iterations,
      result.optimal ? FitStatus::kOptimal : FitStatus::kIterationLimit};
  solution.objective = problem.targets.size() == 0
                           ? 0.0
                           : Residuals(problem, h).cwiseAbs().maxCoeff();
  return solution;
}

const char* FitStatusName(FitStatus status) {
  return status == FitStatus::kOptimal ? "optimal" : "iteration-limit";
}

std::string FormatLp(const FitProblem& problem, const FitSolution* solution) {
  std::ostringstream out;
  out << "# rows=" << problem.values.rows()
      << " columns=" << problem.values.cols() << "\n";
  for (Eigen::Index j = 0; j < problem.values.rows(); ++j) {
    for (Eigen::Index i = 0; i < problem.values.cols(); ++i) {
      out << FormatReal(problem.values(j, i)) << ' ';
    }
    out << "| " << FormatReal(problem.targets[j]) << "\n";
  }
  if (solution != nullptr) {
    out << "# status=" << FitStatusName(solution->status)
        << " objective=" << FormatReal(solution->objective)
        << " iterations=" << solution->iterations << "\nh =";
    for (Eigen::Index i = 0; i < solution->density.weights().size(); ++i) {
      out << ' ' << FormatReal(solution->density.weights()[i]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace dpsynth
