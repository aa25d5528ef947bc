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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances are fixed here and never tuned
// to the observed values.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "dpsynth/audit.h"
#include "dpsynth/distributions.h"
#include "dpsynth/mechanism.h"
#include "dpsynth/optimize.h"
#include "dpsynth/queries.h"
#include "oracles.h"

namespace dpsynth {
namespace {

constexpr std::uint64_t kSeed = 20260417;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer), format, a, b, c);
  return buffer;
}

// p=16, d=1 monotone, nu = mu uniform, delta 0.2, gamma 0.1, n=k=150,
// m=4250, 20 trials.
BooleanExperimentResult BooleanRun() {
  return BooleanExperiment(16, 1, 150, 150, 4250, 0.2, 0.1, 20, kSeed);
}

Outcome Criterion1(const BooleanExperimentResult& r, double seconds) {
  Outcome o;
  const double bound = 0.4 + 3 * std::sqrt(0.4 / 20);
  o.Require(
      r.failure_fraction <= bound,
      Fmt("fraction(err > 1.6) = %.3f <= %.3f", r.failure_fraction, bound));
  o.Require(r.median_error <= 0.8,
            Fmt("median error %.4f <= 0.8", r.median_error));
  o.Require(seconds <= 120.0, Fmt("runtime %.1fs <= 120s", seconds));
  return o;
}

Outcome Criterion2() {
  Outcome o;
  const double expected = 2.0 * 10.0 * 56.0 * std::log(5600.0);
  const PrivacyCheck pass = CheckPrivacy(10000, 1.0, 0.1, 56, 0.01);
  const PrivacyCheck fail = CheckPrivacy(9000, 1.0, 0.1, 56, 0.01);
  o.Require(std::abs(pass.required_n - expected) <= 1e-6 * expected,
            Fmt("required_n %.6f vs %.6f", pass.required_n, expected));
  o.Require(std::abs(pass.required_n - 9666.2) < 0.05,
            Fmt("required_n %.1f ~ 9666.2", pass.required_n));
  o.Require(pass.pass, "n=10000 passes");
  o.Require(!fail.pass, "n=9000 fails");
  return o;
}

Outcome Criterion3(double* seconds) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  Dataset d1(Schema::Boolean(1));
  for (int i = 0; i < 10; ++i) d1.Add({0});
  Dataset d2 = d1;
  d2.Add({1});
  const QueryFamily q({TestFunction::Monotone({0})});
  const double sigma = 0.1;
  const PrivacyAuditResult diff =
      PrivacyAudit(q, sigma, d1, d2, 1000000, 40, kSeed);
  const PrivacyAuditResult same =
      PrivacyAudit(q, sigma, d1, d1, 1000000, 40, kSeed + 1);
  *seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  o.Require(diff.epsilon_hat <= diff.epsilon_theoretical + 0.15,
            Fmt("neighbors: eps_hat %.4f <= %.4f + 0.15", diff.epsilon_hat,
                diff.epsilon_theoretical));
  o.Require(same.epsilon_hat <= 0.05,
            Fmt("identical: eps_hat %.4f <= 0.05", same.epsilon_hat));
  o.Require(*seconds <= 60.0, Fmt("runtime %.1fs <= 60s", *seconds));
  return o;
}

Outcome Criterion4() {
  Outcome o;
  const std::size_t n = 1000000;
  Rng rng(kSeed);
  std::vector<std::size_t> above(3, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::abs(LaplaceSample(1.0, rng));
    for (int t = 1; t <= 3; ++t) above[t - 1] += x > t;
  }
  for (int t = 1; t <= 3; ++t) {
    const double p = std::exp(-static_cast<double>(t));
    const double observed = static_cast<double>(above[t - 1]) / n;
    o.Require(std::abs(observed - p) <= oracle::ThreeSigma(p, n),
              Fmt("t=%.0f: %.5f vs %.5f", t, observed, p));
  }
  return o;
}

Outcome Criterion5(double* seconds) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  std::mt19937_64 gen(kSeed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> target(-1.5, 1.5);
  double worst_gap = 0;
  double worst_certificate = 0;
  int not_optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(gen() % 4);
    const int f = 1 + static_cast<int>(gen() % 3);
    std::vector<std::vector<double>> a(f, std::vector<double>(m));
    std::vector<double> b(f);
    for (auto& row : a) {
      for (double& v : row) v = entry(gen);
    }
    for (double& v : b) v = target(gen);

    FitProblem p;
    p.support = Dataset(Schema({m}));
    for (int i = 0; i < m; ++i) p.support.Add({i});
    p.multiplicity.assign(m, 1);
    p.values.resize(f, m);
    for (int j = 0; j < f; ++j) {
      for (int i = 0; i < m; ++i) p.values(j, i) = a[j][i];
    }
    p.targets = Eigen::Map<const Eigen::VectorXd>(b.data(), f);

    const FitSolution s = SolveMinMax(p);
    if (s.status != FitStatus::kOptimal) ++not_optimal;
    const double grid = oracle::GridMinMax(a, b, m, 1e-3);
    worst_gap = std::max(worst_gap, std::abs(s.objective - grid));
    const Eigen::VectorXd r = Residuals(p, s.density.weights());
    worst_certificate =
        std::max(worst_certificate, r.cwiseAbs().maxCoeff() - s.objective);
    const auto& w = s.density.weights();
    if (w.minCoeff() < 0 || std::abs(w.sum() - 1) > 1e-9) {
      worst_certificate = INFINITY;
    }
  }
  *seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  o.Require(worst_gap <= 2e-3,
            Fmt("max |t* - grid| = %.2e <= 2e-3", worst_gap));
  o.Require(worst_certificate <= 1e-7,
            Fmt("max residual excess %.2e <= 1e-7", worst_certificate));
  o.Require(not_optimal == 0, Fmt("%.0f non-optimal exits", not_optimal));
  o.Require(*seconds <= 60.0, Fmt("runtime %.1fs <= 60s", *seconds));
  return o;
}

Outcome Criterion6() {
  Outcome o;
  const Schema two({2});
  const ExplicitDistribution nu(two, {{0}, {1}}, {0.75, 0.25});
  const ExplicitDistribution mu(two, {{0}, {1}}, {0.5, 0.5});
  const double exact = RenyiConditionNumber(nu, mu);
  o.Require(std::abs(exact - 1.25) <= 1e-12, Fmt("exact kappa %.12f", exact));

  std::mt19937_64 gen(kSeed);
  std::exponential_distribution<double> e(1.0);
  double worst = 0;
  for (int size = 1; size <= 4096; ++size) {
    const Schema schema({size});
    std::vector<DataPoint> points;
    std::vector<double> masses;
    double total = 0;
    for (int i = 0; i < size; ++i) {
      if (size > 1 && gen() % 3 == 0) continue;
      points.push_back({i});
      masses.push_back(e(gen));
      total += masses.back();
    }
    if (points.empty()) {
      points.push_back({0});
      masses.push_back(total = 1.0);
    }
    for (double& m : masses) m /= total;
    const ExplicitDistribution phi(schema, points, masses);
    const double a = KappaUniform(phi, size);
    const double b =
        RenyiConditionNumber(phi, ExplicitDistribution::Uniform(schema));
    worst = std::max(worst, std::abs(a - b));
  }
  o.Require(
      worst <= 1e-12,
      Fmt("max |kappa_uniform - exact| over |Omega| <= 4096: %.2e", worst));

  const double mc = RenyiConditionNumberMonteCarlo(nu, mu, 100000, kSeed);
  o.Require(std::abs(mc - 1.25) <= 0.05 * 1.25, Fmt("MC kappa %.4f", mc));
  return o;
}

Outcome Criterion7() {
  Outcome o;
  const double bound = 0.1 + 3 * std::sqrt(0.1 / 500);

  const Distribution cube = ProductDistribution::Uniform(Schema::Boolean(4));
  const QueryFamily marginals = MarginalFamily(4, 1, MarginalKind::kMonotone);
  const auto n = static_cast<std::size_t>(std::ceil(25 * std::log(50.0)));
  const DeviationResult l3 =
      DeviationCheckEmpirical(cube, marginals, n, 0.2, 0.1, 500, kSeed);
  o.Require(l3.threshold_met && l3.failure_rate <= bound,
            Fmt("empirical measure n=%.0f: failure %.3f <= %.4f", n,
                l3.failure_rate, bound));

  const ExplicitDistribution nu(Schema({2}), {{0}, {1}}, {0.75, 0.25});
  const ExplicitDistribution mu = ExplicitDistribution::Uniform(Schema({2}));
  const QueryFamily pair(
      {TestFunction::ConstantOne(), TestFunction::Assignment({0}, {0})});
  const auto m = static_cast<std::size_t>(std::ceil(25 * 1.25 * 2 / 0.1));
  const ReweightedDeviationResult l4 =
      ReweightedDeviationCheck(nu, mu, pair, m, 0.2, 0.1, 500, kSeed);
  o.Require(l4.threshold_met && l4.failure_rate <= bound,
            Fmt("reweighted m=%.0f: failure %.3f <= %.4f", m, l4.failure_rate,
                bound));

  const ReweightedDeviationResult many =
      ReweightedDeviationCheck(nu, mu, pair, m, 0.2, 0.1, 10000, kSeed + 1);
  o.Require(std::abs(many.mean_r - 1.0) <= 0.01,
            Fmt("mean r over 1e4 trials %.5f", many.mean_r));
  return o;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome Criterion8(const BooleanExperimentResult& first) {
  Outcome o;
  const BooleanExperimentResult second = BooleanRun();
  o.Require(BooleanExperimentReport(first).Render() ==
                BooleanExperimentReport(second).Render(),
            "experiment reports identical");

  // The same configuration through the command line, twice.
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dpsynth_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "x.txt") << FormatDataset(
        Sample(ProductDistribution::Uniform(Schema::Boolean(16)), 150, kSeed));
    std::ofstream(dir / "q.txt") << "marginals monotone d=1\n";
  }
  std::vector<std::string> outputs;
  for (int run = 0; run < 2; ++run) {
    const std::string tag = std::to_string(run);
    // Identical paths: the report echoes them.
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::Run({"generate",
                               "--data",
                               (dir / "x.txt").string(),
                               "--queries",
                               (dir / "q.txt").string(),
                               "--mu",
                               "uniform",
                               "--delta",
                               "0.2",
                               "--gamma",
                               "0.1",
                               "--k",
                               "150",
                               "--m",
                               "4250",
                               "--seed",
                               std::to_string(kSeed),
                               "--out",
                               (dir / "y").string(),
                               "--report",
                               (dir / "r").string()},
                              out, err);
    o.Require(code == cli::kOk, "generate run " + tag + " exit 0");
    outputs.push_back(ReadFile(dir / "y") + "\n--\n" + ReadFile(dir / "r"));
    fs::remove(dir / "y");
    fs::remove(dir / "r");
  }
  o.Require(!outputs[0].empty() && outputs[0] == outputs[1],
            "synthetic dataset and report byte-identical");
  fs::remove_all(dir);
  return o;
}

}  // namespace
}  // namespace dpsynth

// With no argument every criterion runs; with a number only that one.
int main(int argc, char** argv) {
  using dpsynth::Outcome;
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  if (only < 0 || only > 8) {
    std::fprintf(stderr, "usage: %s [criterion 1-8]\n", argv[0]);
    return 2;
  }
  int failures = 0;
  int ran = 0;
  auto run = [&](int id, const char* name,
                 const std::function<Outcome()>& body) {
    if (only != 0 && only != id) return;
    const Outcome o = body();
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id,
                name, o.detail.c_str());
    std::fflush(stdout);
    ++ran;
    if (!o.pass) ++failures;
  };

  std::optional<dpsynth::BooleanExperimentResult> boolean;
  double boolean_seconds = 0;
  auto boolean_run = [&]() -> const dpsynth::BooleanExperimentResult& {
    if (!boolean) {
      const auto start = std::chrono::steady_clock::now();
      boolean = dpsynth::BooleanRun();
      boolean_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    }
    return *boolean;
  };

  double seconds = 0;
  run(1, "Boolean end-to-end accuracy", [&] {
    const auto& r = boolean_run();
    return dpsynth::Criterion1(r, boolean_seconds);
  });
  run(2, "privacy parameter gate", [] { return dpsynth::Criterion2(); });
  run(3, "empirical DP audit", [&] { return dpsynth::Criterion3(&seconds); });
  run(4, "Laplace tail law", [] { return dpsynth::Criterion4(); });
  run(5, "LP oracle equivalence",
      [&] { return dpsynth::Criterion5(&seconds); });
  run(6, "condition number", [] { return dpsynth::Criterion6(); });
  run(7, "sample and reduced-space deviation",
      [] { return dpsynth::Criterion7(); });
  run(8, "determinism", [&] { return dpsynth::Criterion8(boolean_run()); });
  std::printf("%d of %d criteria failed\n", failures, ran);
  return failures == 0 ? 0 : 1;
}
