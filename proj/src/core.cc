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

#include "dpsynth/core.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "dpsynth/random.h"

namespace dpsynth {
namespace {

constexpr std::uint64_t kDomainSizeCap = std::uint64_t{1} << 62;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  // A trailing newline does not start a new line.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string JoinInts(const std::vector<int>& v, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::vector<int> ParseIntList(std::string_view text, std::string_view what) {
  std::vector<int> out;
  text = Trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(',', start);
    std::string_view token = Trim(
        text.substr(start, end == std::string_view::npos ? end : end - start));
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() ||
        ptr != token.data() + token.size()) {
      throw Error(std::string(what) + ": expected an integer, got '" +
                  std::string(token) + "'");
    }
    out.push_back(value);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schema / DataPoint / Dataset

Schema::Schema(std::vector<int> arities) : arities_(std::move(arities)) {
  for (int a : arities_) {
    if (a < 1) throw Error("schema arity must be >= 1");
  }
}

Schema Schema::Boolean(int dimension) {
  if (dimension < 0) throw Error("negative dimension");
  return Schema(std::vector<int>(dimension, 2));
}

bool Schema::IsBoolean() const {
  return std::all_of(arities_.begin(), arities_.end(),
                     [](int a) { return a == 2; });
}

std::optional<std::uint64_t> Schema::DomainSize() const {
  std::uint64_t size = 1;
  for (int a : arities_) {
    if (size > kDomainSizeCap / static_cast<std::uint64_t>(a))
      return std::nullopt;
    size *= static_cast<std::uint64_t>(a);
  }
  return size;
}

std::uint64_t Schema::IndexOf(const DataPoint& point) const {
  std::uint64_t index = 0;
  for (int i = 0; i < dimension(); ++i) {
    index = index * static_cast<std::uint64_t>(arities_[i]) +
            static_cast<std::uint64_t>(point[i]);
  }
  return index;
}

DataPoint Schema::PointAt(std::uint64_t index) const {
  std::vector<int> values(arities_.size());
  for (int i = dimension() - 1; i >= 0; --i) {
    const auto a = static_cast<std::uint64_t>(arities_[i]);
    values[i] = static_cast<int>(index % a);
    index /= a;
  }
  return DataPoint(std::move(values));
}

std::size_t DataPointHash::operator()(const DataPoint& p) const {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (int v : p.values) h = MixSeed(h ^ static_cast<std::uint64_t>(v));
  return static_cast<std::size_t>(h);
}

bool Conforms(const Schema& schema, const DataPoint& point) {
  if (point.size() != schema.dimension()) return false;
  for (int i = 0; i < point.size(); ++i) {
    if (point[i] < 0 || point[i] >= schema.arity(i)) return false;
  }
  return true;
}

Dataset::Dataset(Schema schema, std::vector<DataPoint> points)
    : schema_(std::move(schema)) {
  points_.reserve(points.size());
  for (auto& p : points) Add(std::move(p));
}

void Dataset::Add(DataPoint point) {
  if (!Conforms(schema_, point)) {
    throw Error("point does not conform to schema");
  }
  points_.push_back(std::move(point));
}

void Dataset::Scan(const std::function<void(const DataPoint&)>& visit) const {
  for (const auto& p : points_) visit(p);
}

// ---------------------------------------------------------------------------
// TestFunction

TestFunction TestFunction::ConstantOne() {
  return TestFunction(Kind::kConstantOne, {}, {});
}

TestFunction TestFunction::Monotone(std::vector<int> coordinates) {
  std::sort(coordinates.begin(), coordinates.end());
  if (std::adjacent_find(coordinates.begin(), coordinates.end()) !=
      coordinates.end()) {
    throw Error("marginal coordinates must be distinct");
  }
  if (!coordinates.empty() && coordinates.front() < 0) {
    throw Error("negative coordinate");
  }
  if (coordinates.empty()) return ConstantOne();
  return TestFunction(Kind::kMonotoneMarginal, std::move(coordinates), {});
}

TestFunction TestFunction::Assignment(std::vector<int> coordinates,
                                      std::vector<int> values) {
  if (coordinates.size() != values.size()) {
    throw Error("indicator needs one value per coordinate");
  }
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < coordinates.size(); ++i) {
    if (coordinates[i] < 0 || values[i] < 0) {
      throw Error("negative coordinate or value");
    }
    pairs.emplace_back(coordinates[i], values[i]);
  }
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].first == pairs[i - 1].first) {
      throw Error("indicator coordinates must be distinct");
    }
  }
  if (pairs.empty()) return ConstantOne();
  std::vector<int> c, v;
  for (auto [ci, vi] : pairs) {
    c.push_back(ci);
    v.push_back(vi);
  }
  return TestFunction(Kind::kAssignmentMarginal, std::move(c), std::move(v));
}

TestFunction TestFunction::CustomTable(const Schema& schema,
                                       std::vector<double> table) {
  const auto size = schema.DomainSize();
  if (!size || *size > kMaxTableSize) {
    throw Error("custom table: domain too large for an explicit table");
  }
  if (table.size() != *size) {
    throw Error("custom table: expected one value per domain point");
  }
  for (double v : table) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw Error("custom table: value outside [-1, 1]");
    }
  }
  TestFunction f(Kind::kCustomTable, {}, {});
  f.table_ = std::make_shared<const Table>(Table{schema, std::move(table)});
  return f;
}

double TestFunction::operator()(const DataPoint& x) const {
  switch (kind_) {
    case Kind::kConstantOne:
      return 1.0;
    case Kind::kMonotoneMarginal: {
      double product = 1.0;
      for (int c : coordinates_) product *= x[c];
      return product;
    }
    case Kind::kAssignmentMarginal:
      for (std::size_t i = 0; i < coordinates_.size(); ++i) {
        if (x[coordinates_[i]] != values_[i]) return 0.0;
      }
      return 1.0;
    case Kind::kCustomTable:
      return table_->values[table_->schema.IndexOf(x)];
  }
  return 0.0;
}

void TestFunction::CheckConforms(const Schema& schema) const {
  switch (kind_) {
    case Kind::kConstantOne:
      return;
    case Kind::kMonotoneMarginal:
      for (int c : coordinates_) {
        if (c >= schema.dimension()) {
          throw Error(Describe() + ": coordinate out of range");
        }
        // x(i) in {0, 1} keeps the product in [0, 1].
        if (schema.arity(c) > 2) {
          throw Error(Describe() +
                      ": monotone marginal needs Boolean coordinates");
        }
      }
      return;
    case Kind::kAssignmentMarginal:
      for (std::size_t i = 0; i < coordinates_.size(); ++i) {
        if (coordinates_[i] >= schema.dimension()) {
          throw Error(Describe() + ": coordinate out of range");
        }
        if (values_[i] >= schema.arity(coordinates_[i])) {
          throw Error(Describe() + ": value exceeds coordinate arity");
        }
      }
      return;
    case Kind::kCustomTable:
      if (!(table_->schema == schema)) {
        throw Error("custom table: schema mismatch");
      }
      return;
  }
}

std::string TestFunction::Describe() const {
  auto one_based = [](const std::vector<int>& v) {
    std::vector<int> out(v);
    for (int& c : out) ++c;
    return out;
  };
  switch (kind_) {
    case Kind::kConstantOne:
      return "1";
    case Kind::kMonotoneMarginal:
      return "monotone S={" + JoinInts(one_based(coordinates_)) + "}";
    case Kind::kAssignmentMarginal:
      return "indicator S={" + JoinInts(one_based(coordinates_)) +
             "} values=(" + JoinInts(values_) + ")";
    case Kind::kCustomTable:
      return "table";
  }
  return "";
}

bool TestFunction::operator==(const TestFunction& other) const {
  if (kind_ != other.kind_ || coordinates_ != other.coordinates_ ||
      values_ != other.values_) {
    return false;
  }
  if (kind_ != Kind::kCustomTable) return true;
  return table_->schema == other.table_->schema &&
         table_->values == other.table_->values;
}

bool QueryFamily::ContainsConstantOne() const {
  return std::any_of(functions_.begin(), functions_.end(), [](const auto& f) {
    return f.kind() == TestFunction::Kind::kConstantOne;
  });
}

void QueryFamily::CheckConforms(const Schema& schema) const {
  for (const auto& f : functions_) f.CheckConforms(schema);
}

QueryFamily WithConstantOne(const QueryFamily& family, bool* added) {
  if (added) *added = false;
  if (family.ContainsConstantOne()) return family;
  std::vector<TestFunction> functions{TestFunction::ConstantOne()};
  functions.insert(functions.end(), family.begin(), family.end());
  if (added) *added = true;
  return QueryFamily(std::move(functions));
}

// ---------------------------------------------------------------------------
// FiniteDensity

FiniteDensity::FiniteDensity(Dataset support, Eigen::VectorXd weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (static_cast<std::size_t>(weights_.size()) != support_.size()) {
    throw Error("density: weight count differs from support size");
  }
  if (support_.empty()) throw Error("density: empty support");
  CompensatedSum<double> total;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0)) throw Error("density: negative weight");
    total.Add(weights_[i]);
  }
  if (std::abs(total.Result() - 1.0) > kSumTolerance) {
    throw Error("density: weights do not sum to one");
  }
}

FiniteDensity FiniteDensity::PointMass(Dataset support, std::size_t index) {
  Eigen::VectorXd w =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(support.size()));
  if (index >= support.size()) throw Error("density: index out of range");
  w[static_cast<Eigen::Index>(index)] = 1.0;
  return FiniteDensity(std::move(support), std::move(w));
}

FiniteDensity FiniteDensity::Uniform(Dataset support) {
  const auto m = static_cast<Eigen::Index>(support.size());
  if (m == 0) throw Error("density: empty support");
  return FiniteDensity(
      std::move(support),
      Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
}

// ---------------------------------------------------------------------------
// Statistics

double EvaluateStatistic(const TestFunction& f, const RecordSource& data) {
  if (data.size() == 0) throw Error("empty dataset");
  f.CheckConforms(data.schema());
  CompensatedSum<double> sum;
  data.Scan([&](const DataPoint& x) { sum.Add(f(x)); });
  return sum.Result() / static_cast<double>(data.size());
}

StatisticsVector EvaluateAll(const QueryFamily& queries,
                             const RecordSource& data) {
  if (data.size() == 0) throw Error("empty dataset");
  queries.CheckConforms(data.schema());
  std::vector<CompensatedSum<double>> sums(queries.size());
  data.Scan([&](const DataPoint& x) {
    for (std::size_t j = 0; j < queries.size(); ++j) sums[j].Add(queries[j](x));
  });
  StatisticsVector out(static_cast<Eigen::Index>(queries.size()));
  const double n = static_cast<double>(data.size());
  for (std::size_t j = 0; j < queries.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = sums[j].Result() / n;
  }
  return out;
}

StatisticsVector WeightedStatistics(const QueryFamily& queries,
                                    const FiniteDensity& h) {
  queries.CheckConforms(h.support().schema());
  StatisticsVector out(static_cast<Eigen::Index>(queries.size()));
  for (std::size_t j = 0; j < queries.size(); ++j) {
    CompensatedSum<double> sum;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double w = h.weights()[static_cast<Eigen::Index>(i)];
      if (w != 0.0) sum.Add(queries[j](h.support()[i]) * w);
    }
    out[static_cast<Eigen::Index>(j)] = sum.Result();
  }
  return out;
}

double AccuracyError(const QueryFamily& queries, const RecordSource& x,
                     const RecordSource& y) {
  if (!(x.schema() == y.schema())) throw Error("schema mismatch");
  const StatisticsVector sx = EvaluateAll(queries, x);
  const StatisticsVector sy = EvaluateAll(queries, y);
  if (sx.size() == 0) return 0.0;
  return (sy - sx).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Text format

Dataset ParseDataset(std::string_view text) {
  const auto lines = SplitLines(text);
  if (lines.empty()) throw Error("dataset: missing arity header");
  Schema schema;
  try {
    schema = Schema(ParseIntList(lines[0], "line 1"));
  } catch (const Error& e) {
    throw Error(std::string("dataset: ") + e.what());
  }
  Dataset data(schema);
  data.Reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1);
    DataPoint p;
    try {
      p = DataPoint(ParseIntList(lines[i], where));
    } catch (const Error& e) {
      throw Error(std::string("dataset: ") + e.what());
    }
    if (!Conforms(schema, p)) {
      throw Error("dataset: " + where + ": point does not conform to schema");
    }
    data.Add(std::move(p));
  }
  return data;
}

std::string FormatDataset(const Dataset& data) {
  std::ostringstream out;
  out << JoinInts(data.schema().arities()) << '\n';
  for (const auto& p : data) out << JoinInts(p.values) << '\n';
  return out.str();
}

}  // namespace dpsynth
