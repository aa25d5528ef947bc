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

#include "cli.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dpsynth/audit.h"
#include "dpsynth/core.h"
#include "dpsynth/distributions.h"
#include "dpsynth/queries.h"
#include "dpsynth/report.h"
#include "dpsynth/synth.h"

namespace dpsynth::cli {
namespace {

// Raised for unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

std::string ReadFile(const std::string& path, const std::string& flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(flag + ": cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, const std::string& contents,
               const std::string& flag) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(flag + ": cannot write '" + path + "'");
  out << contents;
  if (!out) throw IoError(flag + ": write failed for '" + path + "'");
}

// Writes to `path` if given, otherwise to `out`.
void Emit(const std::optional<std::string>& path, const std::string& contents,
          std::ostream& out, const std::string& flag) {
  if (path) {
    WriteFile(*path, contents, flag);
  } else {
    out << contents;
  }
}

Distribution LoadDistribution(const std::string& value, const std::string& flag,
                              const Schema* schema_for_uniform) {
  if (value == "uniform") {
    if (schema_for_uniform == nullptr) {
      throw Error(flag + ": 'uniform' needs a schema to be known");
    }
    return ProductDistribution::Uniform(*schema_for_uniform);
  }
  try {
    return ParseDistributionSpec(ReadFile(value, flag));
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw Error(flag + ": " + e.what());
  }
}

std::string FormatFixed9(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9f", v);
  return buffer;
}

// ---------------------------------------------------------------------------

struct GenerateFlags {
  std::string data;
  std::string queries;
  std::string mu = "uniform";
  double delta = 0;
  double gamma = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::optional<double> epsilon;
  bool allow_override = false;
  double kappa_bound = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<std::string> report;
  bool export_targets = false;
};

int RunGenerate(const GenerateFlags& f, std::ostream& out, std::ostream& err) {
  Dataset data;
  try {
    data = ParseDataset(ReadFile(f.data, "--data"));
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string("--data: ") + e.what());
  }
  QueryFamily queries;
  try {
    queries = ParseQuerySpec(ReadFile(f.queries, "--queries"), data.schema(),
                             /*add_constant_one=*/false);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string("--queries: ") + e.what());
  }
  const Distribution mu = LoadDistribution(f.mu, "--mu", &data.schema());

  PipelineConfig config;
  config.delta_target = f.delta;
  config.gamma = f.gamma;
  config.epsilon = f.epsilon;
  config.allow_privacy_override = f.allow_override;
  config.k = f.k;
  config.m = f.m;
  config.kappa_bound = f.kappa_bound;
  config.seed = f.seed;
  config.export_noisy_targets = f.export_targets;

  std::optional<GenerateResult> result;
  try {
    result.emplace(Generate(data, queries, mu, config));
  } catch (const PrivacyGateError& e) {
    err << "error: " << e.what()
        << " (pass --allow-privacy-override to proceed)\n";
    return kGuaranteeGate;
  }

  Report report;
  report.Set("command", "generate");
  report.Set("data", f.data);
  report.Set("queries", f.queries);
  report.Set("mu", f.mu);
  report.Set("out", f.out);
  report.Merge(result->report);
  WriteFile(f.out, FormatDataset(result->synthetic), "--out");
  Emit(f.report, report.Render(), out, "--report");
  return kOk;
}

// ---------------------------------------------------------------------------

struct AuditFlags {
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  int p = 0;
  int d = 1;
  std::string kind = "monotone";
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  double delta = 0.2;
  double gamma = 0.1;
  std::size_t trials = 0;
  std::optional<std::string> nu;
  std::string mu = "uniform";
  std::optional<std::string> queries;
  std::string d1;
  std::string d2;
  double sigma = 0;
  std::size_t bins = 40;
  double slack = kDefaultAuditSlack;
};

QueryFamily AuditQueries(const AuditFlags& f, const Schema& schema) {
  if (f.queries) {
    try {
      return ParseQuerySpec(ReadFile(*f.queries, "--queries"), schema);
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      throw Error(std::string("--queries: ") + e.what());
    }
  }
  return MarginalFamily(schema, f.d,
                        f.kind == "assignment" ? MarginalKind::kAssignment
                                               : MarginalKind::kMonotone);
}

void EchoCommon(Report& report, const char* which, const AuditFlags& f) {
  report.Set("command", std::string("audit ") + which);
  report.Set("seed", static_cast<std::uint64_t>(f.seed));
  report.Set("trials", static_cast<std::uint64_t>(f.trials));
}

int RunLemma3(const AuditFlags& f, std::ostream& out) {
  const Schema boolean = Schema::Boolean(f.p);
  const Distribution nu =
      f.nu ? LoadDistribution(*f.nu, "--nu", &boolean)
           : Distribution(ProductDistribution::Uniform(boolean));
  const QueryFamily queries = AuditQueries(f, SchemaOf(nu));
  const DeviationResult r = DeviationCheckEmpirical(nu, queries, f.n, f.delta,
                                                    f.gamma, f.trials, f.seed);
  Report report;
  EchoCommon(report, "lemma3", f);
  report.Set("nu", f.nu.value_or("uniform"));
  report.Set("family_size", static_cast<std::uint64_t>(queries.size()));
  report.Set("n", static_cast<std::uint64_t>(f.n));
  report.Set("delta", f.delta);
  report.Set("gamma", f.gamma);
  report.Merge(DeviationReport(r));
  Emit(f.out, report.Render(), out, "--out");
  return r.pass ? kOk : kGuaranteeGate;
}

int RunLemma4(const AuditFlags& f, std::ostream& out) {
  if (!f.nu) throw Error("--nu is required");
  const Distribution nu = LoadDistribution(*f.nu, "--nu", nullptr);
  const Distribution mu = LoadDistribution(f.mu, "--mu", &SchemaOf(nu));
  const QueryFamily queries = AuditQueries(f, SchemaOf(mu));
  std::size_t m = f.m;
  if (m == 0) {
    const double kappa = RenyiConditionNumber(nu, mu);
    m = static_cast<std::size_t>(
        std::ceil(kappa * static_cast<double>(queries.size()) / f.gamma /
                  (f.delta * f.delta)));
  }
  const ReweightedDeviationResult r = ReweightedDeviationCheck(
      nu, mu, queries, m, f.delta, f.gamma, f.trials, f.seed);
  Report report;
  EchoCommon(report, "lemma4", f);
  report.Set("nu", *f.nu);
  report.Set("mu", f.mu);
  report.Set("family_size", static_cast<std::uint64_t>(queries.size()));
  report.Set("m", static_cast<std::uint64_t>(m));
  report.Set("delta", f.delta);
  report.Set("gamma", f.gamma);
  report.Merge(ReweightedReport(r));
  Emit(f.out, report.Render(), out, "--out");
  return r.pass ? kOk : kGuaranteeGate;
}

int RunDp(const AuditFlags& f, std::ostream& out) {
  const Dataset d1 = ParseDataset(ReadFile(f.d1, "--d1"));
  const Dataset d2 = ParseDataset(ReadFile(f.d2, "--d2"));
  // The constant function releases nothing about the data and would only add
  // a histogram dimension, so the default family leaves it out.
  QueryFamily queries;
  if (f.queries) {
    queries = ParseQuerySpec(ReadFile(*f.queries, "--queries"), d1.schema(),
                             /*add_constant_one=*/false);
  } else {
    for (const auto& fn :
         MarginalFamily(d1.schema(), f.d, MarginalKind::kMonotone)) {
      if (fn.kind() != TestFunction::Kind::kConstantOne) queries.Append(fn);
    }
  }
  const PrivacyAuditResult r =
      PrivacyAudit(queries, f.sigma, d1, d2, f.trials, f.bins, f.seed, f.slack);
  Report report;
  EchoCommon(report, "dp", f);
  report.Set("d1", f.d1);
  report.Set("d2", f.d2);
  report.Set("sigma", f.sigma);
  report.Set("bins", static_cast<std::uint64_t>(f.bins));
  report.Set("family_size", static_cast<std::uint64_t>(queries.size()));
  report.Merge(PrivacyAuditReport(r));
  Emit(f.out, report.Render(), out, "--out");
  return r.pass ? kOk : kGuaranteeGate;
}

int RunCorollary(const AuditFlags& f, std::ostream& out) {
  const BooleanExperimentResult r = BooleanExperiment(
      f.p, f.d, f.n, f.k, f.m, f.delta, f.gamma, f.trials, f.seed);
  Report report;
  EchoCommon(report, "corollary", f);
  report.Set("p", f.p);
  report.Set("d", f.d);
  report.Set("n", static_cast<std::uint64_t>(f.n));
  report.Set("k", static_cast<std::uint64_t>(f.k));
  report.Set("m", static_cast<std::uint64_t>(f.m));
  report.Set("delta", f.delta);
  report.Set("gamma", f.gamma);
  report.Merge(BooleanExperimentReport(r));
  Emit(f.out, report.Render(), out, "--out");
  return r.pass ? kOk : kGuaranteeGate;
}

// ---------------------------------------------------------------------------

struct KappaFlags {
  std::string nu;
  std::string mu;
  std::optional<std::size_t> mc;
  std::uint64_t seed = 0;
};

int RunKappa(const KappaFlags& f, std::ostream& out) {
  const Distribution nu = LoadDistribution(f.nu, "--nu", nullptr);
  const Distribution mu = LoadDistribution(f.mu, "--mu", &SchemaOf(nu));
  out << FormatFixed9(RenyiConditionNumber(nu, mu)) << "\n";
  if (f.mc) {
    out << "mc="
        << FormatFixed9(RenyiConditionNumberMonteCarlo(nu, mu, *f.mc, f.seed))
        << "\n";
  }
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{
      "Differentially private synthetic data via reduced-space fitting",
      "dpsynth"};
  app.require_subcommand(1);

  GenerateFlags gen;
  auto* generate =
      app.add_subcommand("generate", "Generate a synthetic dataset");
  generate->add_option("--data", gen.data, "True dataset file")->required();
  generate->add_option("--queries", gen.queries, "Query-spec file")->required();
  generate->add_option("--mu", gen.mu,
                       "Sampling distribution spec file, or 'uniform'");
  generate->add_option("--delta", gen.delta, "Accuracy target delta")
      ->required();
  generate->add_option("--gamma", gen.gamma, "Failure probability gamma")
      ->required();
  generate->add_option("--k", gen.k, "Synthetic dataset size")->required();
  generate->add_option("--m", gen.m, "Reduced space size")->required();
  generate->add_option("--epsilon", gen.epsilon,
                       "Required privacy budget; fails if unattainable");
  generate->add_flag("--allow-privacy-override", gen.allow_override,
                     "Generate even if the epsilon condition fails");
  generate->add_option("--kappa-bound", gen.kappa_bound,
                       "Trusted bound on the Renyi condition number");
  generate->add_option("--seed", gen.seed, "Random seed")->required();
  generate->add_option("--out", gen.out, "Output dataset file")->required();
  generate->add_option("--report", gen.report, "Report file (default stdout)");
  generate->add_flag("--export-noisy-targets", gen.export_targets,
                     "Include the noisy statistics in the report");

  AuditFlags audit_flags;
  auto* audit = app.add_subcommand("audit", "Statistical verification harness");
  audit->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", audit_flags.seed, "Random seed")->required();
    sub->add_option("--trials", audit_flags.trials, "Number of trials")
        ->required();
    sub->add_option("--out", audit_flags.out, "Report file (default stdout)");
  };
  auto* lemma3 =
      audit->add_subcommand("lemma3", "Deviation of the empirical measure");
  add_common(lemma3);
  lemma3->add_option("--p", audit_flags.p, "Boolean dimension");
  lemma3->add_option("--d", audit_flags.d, "Marginal degree");
  lemma3->add_option("--kind", audit_flags.kind, "monotone|assignment")
      ->check(CLI::IsMember({"monotone", "assignment"}));
  lemma3->add_option("--nu", audit_flags.nu,
                     "Population distribution spec file");
  lemma3->add_option("--queries", audit_flags.queries, "Query-spec file");
  lemma3->add_option("--n", audit_flags.n, "Sample size")->required();
  lemma3->add_option("--delta", audit_flags.delta, "Deviation delta");
  lemma3->add_option("--gamma", audit_flags.gamma, "Failure probability gamma");

  auto* lemma4 = audit->add_subcommand(
      "lemma4", "Deviation of the reweighted reduced space");
  add_common(lemma4);
  lemma4
      ->add_option("--nu", audit_flags.nu, "Population distribution spec file")
      ->required();
  lemma4->add_option("--mu", audit_flags.mu,
                     "Sampling distribution spec file or 'uniform'");
  lemma4->add_option("--queries", audit_flags.queries, "Query-spec file");
  lemma4->add_option("--d", audit_flags.d, "Marginal degree when no --queries");
  lemma4->add_option("--kind", audit_flags.kind, "monotone|assignment")
      ->check(CLI::IsMember({"monotone", "assignment"}));
  lemma4->add_option("--m", audit_flags.m,
                     "Reduced space size (default: threshold)");
  lemma4->add_option("--delta", audit_flags.delta, "Deviation delta");
  lemma4->add_option("--gamma", audit_flags.gamma, "Failure probability gamma");

  auto* dp =
      audit->add_subcommand("dp", "Histogram audit of the Laplace stage");
  add_common(dp);
  dp->add_option("--d1", audit_flags.d1, "First dataset file")->required();
  dp->add_option("--d2", audit_flags.d2, "Neighboring dataset file")
      ->required();
  dp->add_option("--queries", audit_flags.queries, "Query-spec file");
  dp->add_option("--d", audit_flags.d, "Marginal degree when no --queries");
  dp->add_option("--sigma", audit_flags.sigma, "Laplace scale")->required();
  dp->add_option("--bins", audit_flags.bins, "Bins per dimension");
  dp->add_option("--slack", audit_flags.slack,
                 "Allowed excess over the theory");

  auto* corollary =
      audit->add_subcommand("corollary", "Boolean end-to-end experiment");
  add_common(corollary);
  corollary->add_option("--p", audit_flags.p, "Boolean dimension")->required();
  corollary->add_option("--d", audit_flags.d, "Marginal degree")->required();
  corollary->add_option("--n", audit_flags.n, "True data size")->required();
  corollary->add_option("--k", audit_flags.k, "Synthetic data size")
      ->required();
  corollary->add_option("--m", audit_flags.m, "Reduced space size")->required();
  corollary->add_option("--delta", audit_flags.delta, "Accuracy target delta");
  corollary->add_option("--gamma", audit_flags.gamma,
                        "Failure probability gamma");

  KappaFlags kappa_flags;
  auto* kappa = app.add_subcommand(
      "kappa", "Renyi condition number of two distributions");
  kappa->add_option("--nu", kappa_flags.nu, "Population distribution spec file")
      ->required();
  kappa
      ->add_option("--mu", kappa_flags.mu,
                   "Sampling distribution spec file or 'uniform'")
      ->required();
  kappa->add_option("--mc", kappa_flags.mc,
                    "Also estimate by Monte Carlo with this many samples");
  kappa->add_option("--seed", kappa_flags.seed, "Seed for --mc");

  std::vector<const char*> argv{"dpsynth"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageOrIoError;
  }

  try {
    if (generate->parsed()) return RunGenerate(gen, out, err);
    if (lemma3->parsed()) return RunLemma3(audit_flags, out);
    if (lemma4->parsed()) return RunLemma4(audit_flags, out);
    if (dp->parsed()) return RunDp(audit_flags, out);
    if (corollary->parsed()) return RunCorollary(audit_flags, out);
    if (kappa->parsed()) return RunKappa(kappa_flags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageOrIoError;
  }
  err << app.help();
  return kUsageOrIoError;
}

}  // namespace dpsynth::cli
