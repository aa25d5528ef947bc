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

#include "dpsynth/distributions.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace dpsynth {
namespace {

constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 22;
constexpr char kNotDominated[] = "nu not dominated by mu";

std::vector<double> Cumulative(const std::vector<double>& masses) {
  std::vector<double> cumulative(masses.size());
  CompensatedSum<double> sum;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    sum.Add(masses[i]);
    cumulative[i] = sum.Result();
  }
  return cumulative;
}

// Inverse-CDF lookup that never lands on a zero-mass entry.
std::size_t DrawIndex(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
  // Skip back over trailing zero-mass entries reached through rounding.
  while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;
  return i;
}

void CheckMasses(const std::vector<double>& masses, double tolerance,
                 const char* what) {
  CompensatedSum<double> total;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw Error(std::string(what) + ": masses must be nonnegative");
    }
    total.Add(m);
  }
  if (std::abs(total.Result() - 1.0) > tolerance) {
    throw Error(std::string(what) + ": masses must sum to 1");
  }
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double ParseDouble(std::string_view token, const std::string& where) {
  const std::string owned(Trim(token));
  char* end = nullptr;
  const double v = std::strtod(owned.c_str(), &end);
  if (owned.empty() || end != owned.c_str() + owned.size()) {
    throw Error(where + ": expected a number, got '" + owned + "'");
  }
  return v;
}

std::vector<double> ParseDoubleList(std::string_view text,
                                    const std::string& where) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(',', start);
    out.push_back(ParseDouble(
        text.substr(start, end == std::string_view::npos ? end : end - start),
        where));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

template <typename Visit>
void ForEachPoint(const Schema& schema, Visit&& visit) {
  const auto size = schema.DomainSize();
  if (!size || *size > kMaxEnumeration) {
    throw Error("domain too large to enumerate");
  }
  for (std::uint64_t i = 0; i < *size; ++i) visit(schema.PointAt(i));
}

}  // namespace

// ---------------------------------------------------------------------------
// ProductDistribution

ProductDistribution::ProductDistribution(
    std::vector<std::vector<double>> probabilities)
    : probabilities_(std::move(probabilities)) {
  std::vector<int> arities;
  for (const auto& p : probabilities_) {
    if (p.empty()) throw Error("product distribution: empty coordinate");
    CheckMasses(p, kSumTolerance, "product distribution");
    arities.push_back(static_cast<int>(p.size()));
    cumulative_.push_back(Cumulative(p));
  }
  schema_ = Schema(std::move(arities));
}

ProductDistribution ProductDistribution::Uniform(const Schema& schema) {
  std::vector<std::vector<double>> probabilities;
  for (int a : schema.arities()) {
    probabilities.emplace_back(a, 1.0 / a);
  }
  return ProductDistribution(std::move(probabilities));
}

double ProductDistribution::Mass(const DataPoint& x) const {
  if (!Conforms(schema_, x)) return 0.0;
  double mass = 1.0;
  for (int i = 0; i < x.size(); ++i) mass *= probabilities_[i][x[i]];
  return mass;
}

DataPoint ProductDistribution::Draw(Rng& rng) const {
  DataPoint out;
  DrawInto(rng, out);
  return out;
}

void ProductDistribution::DrawInto(Rng& rng, DataPoint& out) const {
  out.values.resize(cumulative_.size());
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    out.values[i] = static_cast<int>(DrawIndex(cumulative_[i], rng.Uniform()));
  }
}

// ---------------------------------------------------------------------------
// ExplicitDistribution

namespace {

Schema InferSchema(const std::vector<DataPoint>& points) {
  if (points.empty()) throw Error("explicit distribution: no points");
  std::vector<int> arities(points.front().size(), 1);
  for (const auto& p : points) {
    if (p.size() != static_cast<int>(arities.size())) {
      throw Error("explicit distribution: points differ in dimension");
    }
    for (int i = 0; i < p.size(); ++i) {
      if (p[i] < 0) throw Error("explicit distribution: negative value");
      arities[i] = std::max(arities[i], p[i] + 1);
    }
  }
  return Schema(std::move(arities));
}

}  // namespace

ExplicitDistribution::ExplicitDistribution(Schema schema,
                                           std::vector<DataPoint> points,
                                           std::vector<double> masses)
    : schema_(std::move(schema)),
      points_(std::move(points)),
      masses_(std::move(masses)) {
  if (points_.empty()) throw Error("explicit distribution: no points");
  if (points_.size() != masses_.size()) {
    throw Error("explicit distribution: one mass per point required");
  }
  CheckMasses(masses_, kSumTolerance, "explicit distribution");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!Conforms(schema_, points_[i])) {
      throw Error("explicit distribution: point does not conform to schema");
    }
    if (!index_.emplace(points_[i], i).second) {
      throw Error("explicit distribution: duplicate point");
    }
  }
  cumulative_ = Cumulative(masses_);
}

ExplicitDistribution::ExplicitDistribution(std::vector<DataPoint> points,
                                           std::vector<double> masses)
    : ExplicitDistribution(InferSchema(points), points, std::move(masses)) {}

ExplicitDistribution ExplicitDistribution::Uniform(const Schema& schema) {
  std::vector<DataPoint> points;
  ForEachPoint(schema, [&](DataPoint p) { points.push_back(std::move(p)); });
  std::vector<double> masses(points.size(),
                             1.0 / static_cast<double>(points.size()));
  // 1/N rounded N times may miss 1 by more than the tolerance for large N.
  if (!points.empty()) {
    CompensatedSum<double> rest;
    for (std::size_t i = 1; i < masses.size(); ++i) rest.Add(masses[i]);
    masses[0] = 1.0 - rest.Result();
  }
  return ExplicitDistribution(schema, std::move(points), std::move(masses));
}

double ExplicitDistribution::Mass(const DataPoint& x) const {
  const auto it = index_.find(x);
  return it == index_.end() ? 0.0 : masses_[it->second];
}

DataPoint ExplicitDistribution::Draw(Rng& rng) const {
  return points_[DrawIndex(cumulative_, rng.Uniform())];
}

void ExplicitDistribution::DrawInto(Rng& rng, DataPoint& out) const {
  out.values = points_[DrawIndex(cumulative_, rng.Uniform())].values;
}

ExplicitDistribution ExplicitDistribution::WithSchema(Schema schema) const {
  return ExplicitDistribution(std::move(schema), points_, masses_);
}

// ---------------------------------------------------------------------------
// Free functions

const Schema& SchemaOf(const Distribution& dist) {
  return std::visit([](const auto& d) -> const Schema& { return d.schema(); },
                    dist);
}

double Mass(const Distribution& dist, const DataPoint& x) {
  return std::visit([&](const auto& d) { return d.Mass(x); }, dist);
}

Dataset Sample(const Distribution& dist, std::size_t count, Rng& rng) {
  Dataset out(SchemaOf(dist));
  out.Reserve(count);
  std::visit(
      [&](const auto& d) {
        for (std::size_t i = 0; i < count; ++i) out.Add(d.Draw(rng));
      },
      dist);
  return out;
}

Dataset Sample(const Distribution& dist, std::size_t count,
               std::uint64_t seed) {
  Rng rng(seed);
  return Sample(dist, count, rng);
}

double DensityRatio(const Distribution& nu, const Distribution& mu,
                    const DataPoint& x) {
  const auto* nu_product = std::get_if<ProductDistribution>(&nu);
  const auto* mu_product = std::get_if<ProductDistribution>(&mu);
  if (nu_product && mu_product &&
      nu_product->schema() == mu_product->schema()) {
    // Coordinatewise, so that tiny joint masses in high dimension do not
    // underflow.
    double ratio = 1.0;
    for (int i = 0; i < x.size(); ++i) {
      const double a = nu_product->probabilities(i)[x[i]];
      const double b = mu_product->probabilities(i)[x[i]];
      if (a == 0.0) return 0.0;
      if (b == 0.0) throw Error(kNotDominated);
      ratio *= a / b;
    }
    return ratio;
  }
  const double a = Mass(nu, x);
  if (a == 0.0) return 0.0;
  const double b = Mass(mu, x);
  if (b == 0.0) throw Error(kNotDominated);
  return a / b;
}

double RenyiConditionNumber(const Distribution& nu, const Distribution& mu) {
  if (SchemaOf(nu).dimension() != SchemaOf(mu).dimension()) {
    throw Error("kappa: distributions have different dimensions");
  }
  const auto* nu_product = std::get_if<ProductDistribution>(&nu);
  const auto* mu_product = std::get_if<ProductDistribution>(&mu);
  if (nu_product && mu_product) {
    const Schema& schema = nu_product->schema();
    double log_kappa = 0.0;
    for (int i = 0; i < schema.dimension(); ++i) {
      const auto& a = nu_product->probabilities(i);
      const auto& b = mu_product->probabilities(i);
      CompensatedSum<double> sum;
      for (std::size_t c = 0; c < a.size(); ++c) {
        if (a[c] == 0.0) continue;
        if (c >= b.size() || b[c] == 0.0) throw Error(kNotDominated);
        sum.Add(a[c] * a[c] / b[c]);
      }
      log_kappa += std::log(sum.Result());
    }
    return std::exp(log_kappa);
  }

  CompensatedSum<double> sum;
  auto add = [&](const DataPoint& x, double a) {
    if (a == 0.0) return;
    const double b = Mass(mu, x);
    if (b == 0.0) throw Error(kNotDominated);
    sum.Add(a * a / b);
  };
  if (const auto* explicit_nu = std::get_if<ExplicitDistribution>(&nu)) {
    for (std::size_t i = 0; i < explicit_nu->points().size(); ++i) {
      add(explicit_nu->points()[i], explicit_nu->masses()[i]);
    }
  } else {
    ForEachPoint(nu_product->schema(),
                 [&](const DataPoint& x) { add(x, nu_product->Mass(x)); });
  }
  return sum.Result();
}

double RenyiConditionNumberMonteCarlo(const Distribution& nu,
                                      const Distribution& mu,
                                      std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error("kappa: need at least one sample");
  Rng rng(seed);
  CompensatedSum<double> sum;
  std::visit(
      [&](const auto& d) {
        for (std::size_t s = 0; s < samples; ++s) {
          sum.Add(DensityRatio(nu, mu, d.Draw(rng)));
        }
      },
      nu);
  return sum.Result() / static_cast<double>(samples);
}

double KappaUniform(const ExplicitDistribution& phi,
                    std::uint64_t domain_size) {
  CompensatedSum<double> sum;
  for (double m : phi.masses()) sum.Add(m * m);
  return static_cast<double>(domain_size) * sum.Result();
}

double Expectation(const TestFunction& f, const Distribution& nu) {
  f.CheckConforms(SchemaOf(nu));
  if (const auto* product = std::get_if<ProductDistribution>(&nu)) {
    using Kind = TestFunction::Kind;
    switch (f.kind()) {
      case Kind::kConstantOne:
        return 1.0;
      case Kind::kMonotoneMarginal: {
        double e = 1.0;
        for (int c : f.coordinates()) {
          const auto& probs = product->probabilities(c);
          e *= probs.size() > 1 ? probs[1] : 0.0;
        }
        return e;
      }
      case Kind::kAssignmentMarginal: {
        double e = 1.0;
        for (std::size_t i = 0; i < f.coordinates().size(); ++i) {
          e *= product->probabilities(f.coordinates()[i])[f.values()[i]];
        }
        return e;
      }
      case Kind::kCustomTable: {
        CompensatedSum<double> sum;
        ForEachPoint(product->schema(), [&](const DataPoint& x) {
          sum.Add(product->Mass(x) * f(x));
        });
        return sum.Result();
      }
    }
  }
  const auto& explicit_nu = std::get<ExplicitDistribution>(nu);
  CompensatedSum<double> sum;
  for (std::size_t i = 0; i < explicit_nu.points().size(); ++i) {
    sum.Add(explicit_nu.masses()[i] * f(explicit_nu.points()[i]));
  }
  return sum.Result();
}

StatisticsVector ExactStatistics(const QueryFamily& queries,
                                 const Distribution& nu) {
  StatisticsVector out(static_cast<Eigen::Index>(queries.size()));
  for (std::size_t j = 0; j < queries.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = Expectation(queries[j], nu);
  }
  return out;
}

Distribution ParseDistributionSpec(std::string_view text) {
  enum class Mode { kUnset, kProduct, kExplicit } mode = Mode::kUnset;
  std::vector<std::vector<double>> probabilities;
  std::vector<DataPoint> points;
  std::vector<double> masses;

  std::size_t start = 0;
  int line_number = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where =
        "distribution spec line " + std::to_string(line_number);
    if (mode == Mode::kUnset) {
      if (line == "product") {
        mode = Mode::kProduct;
      } else if (line == "explicit") {
        mode = Mode::kExplicit;
      } else {
        throw Error(where + ": expected 'product' or 'explicit'");
      }
      continue;
    }
    if (mode == Mode::kProduct) {
      probabilities.push_back(ParseDoubleList(line, where));
      continue;
    }
    const auto semicolon = line.find(';');
    if (semicolon == std::string_view::npos) {
      throw Error(where + ": expected 'point;mass'");
    }
    points.emplace_back(ParseIntList(line.substr(0, semicolon), where));
    masses.push_back(ParseDouble(line.substr(semicolon + 1), where));
  }
  try {
    switch (mode) {
      case Mode::kUnset:
        throw Error("empty");
      case Mode::kProduct:
        return ProductDistribution(std::move(probabilities));
      case Mode::kExplicit:
        return ExplicitDistribution(std::move(points), std::move(masses));
    }
  } catch (const Error& e) {
    throw Error(std::string("distribution spec: ") + e.what());
  }
  throw Error("distribution spec: unreachable");
}

}  // namespace dpsynth
