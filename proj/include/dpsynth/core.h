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

// Domain types shared by every stage of the generator: categorical points,
// datasets, bounded test functions, and the linear statistics
// (1/n) * sum_i f(x_i) computed from them.

#ifndef DPSYNTH_CORE_H_
#define DPSYNTH_CORE_H_

#include <Eigen/Dense>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dpsynth {

// All contract violations raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Error-compensated (Neumaier) accumulator.
template <typename Scalar>
class CompensatedSum {
 public:
  void Add(Scalar x) {
    const Scalar t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Scalar Result() const { return sum_ + compensation_; }

 private:
  static Scalar abs(Scalar v) { return v < Scalar(0) ? -v : v; }
  Scalar sum_{0};
  Scalar compensation_{0};
};

struct DataPoint {
  std::vector<int> values;

  DataPoint() = default;
  explicit DataPoint(std::vector<int> v) : values(std::move(v)) {}
  DataPoint(std::initializer_list<int> v) : values(v) {}

  int size() const { return static_cast<int>(values.size()); }
  int operator[](int i) const { return values[i]; }

  bool operator==(const DataPoint&) const = default;
  auto operator<=>(const DataPoint&) const = default;
};

// Per-coordinate arities of a finite categorical ground set. The Boolean
// cube {0,1}^p is the schema with arity 2 everywhere.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<int> arities);

  static Schema Boolean(int dimension);

  int dimension() const { return static_cast<int>(arities_.size()); }
  int arity(int coordinate) const { return arities_[coordinate]; }
  const std::vector<int>& arities() const { return arities_; }
  bool IsBoolean() const;

  // Number of points in the ground set, or nullopt if it exceeds 2^62.
  std::optional<std::uint64_t> DomainSize() const;

  // Mixed-radix rank of a point, first coordinate most significant.
  std::uint64_t IndexOf(const DataPoint& point) const;
  DataPoint PointAt(std::uint64_t index) const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<int> arities_;
};

struct DataPointHash {
  std::size_t operator()(const DataPoint& p) const;
};

bool Conforms(const Schema& schema, const DataPoint& point);

// Read-only, single-pass access to records. The synthesis pipeline consumes
// the true data only through this interface.
class RecordSource {
 public:
  virtual ~RecordSource() = default;
  virtual const Schema& schema() const = 0;
  virtual std::size_t size() const = 0;
  virtual void Scan(
      const std::function<void(const DataPoint&)>& visit) const = 0;
};

// Ordered sequence of points over a schema. Repetitions are legal.
class Dataset : public RecordSource {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema) : schema_(std::move(schema)) {}
  Dataset(Schema schema, std::vector<DataPoint> points);

  const Schema& schema() const override { return schema_; }
  std::size_t size() const override { return points_.size(); }
  void Scan(const std::function<void(const DataPoint&)>& visit) const override;

  bool empty() const { return points_.empty(); }
  const DataPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<DataPoint>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  void Add(DataPoint point);
  void Reserve(std::size_t n) { points_.reserve(n); }

  bool operator==(const Dataset& other) const {
    return schema_ == other.schema_ && points_ == other.points_;
  }

 private:
  Schema schema_;
  std::vector<DataPoint> points_;
};

// A function from the ground set to [-1, 1]. Coordinates are zero-based.
class TestFunction {
 public:
  enum class Kind {
    kConstantOne,
    // prod_{i in S} x(i); Boolean schemas only.
    kMonotoneMarginal,
    // 1{x(i) = v_i for all i in S}.
    kAssignmentMarginal,
    // Explicit value per point of a small schema.
    kCustomTable,
  };

  static TestFunction ConstantOne();
  static TestFunction Monotone(std::vector<int> coordinates);
  static TestFunction Assignment(std::vector<int> coordinates,
                                 std::vector<int> values);
  // Rejects tables over domains larger than kMaxTableSize or with entries
  // outside [-1, 1].
  static TestFunction CustomTable(const Schema& schema,
                                  std::vector<double> table);

  static constexpr std::uint64_t kMaxTableSize = std::uint64_t{1} << 22;

  Kind kind() const { return kind_; }
  const std::vector<int>& coordinates() const { return coordinates_; }
  const std::vector<int>& values() const { return values_; }

  double operator()(const DataPoint& x) const;

  // Throws Error if the function is not defined on `schema` or could leave
  // [-1, 1] there.
  void CheckConforms(const Schema& schema) const;

  std::string Describe() const;

  bool operator==(const TestFunction& other) const;

 private:
  struct Table {
    Schema schema;
    std::vector<double> values;
  };

  TestFunction(Kind kind, std::vector<int> coordinates, std::vector<int> values)
      : kind_(kind),
        coordinates_(std::move(coordinates)),
        values_(std::move(values)) {}

  Kind kind_ = Kind::kConstantOne;
  std::vector<int> coordinates_;
  std::vector<int> values_;
  std::shared_ptr<const Table> table_;
};

// Ordered finite class of test functions; index j is stable.
class QueryFamily {
 public:
  QueryFamily() = default;
  explicit QueryFamily(std::vector<TestFunction> functions)
      : functions_(std::move(functions)) {}

  std::size_t size() const { return functions_.size(); }
  bool empty() const { return functions_.empty(); }
  const TestFunction& operator[](std::size_t j) const { return functions_[j]; }
  auto begin() const { return functions_.begin(); }
  auto end() const { return functions_.end(); }

  void Append(TestFunction f) { functions_.push_back(std::move(f)); }
  bool ContainsConstantOne() const;
  void CheckConforms(const Schema& schema) const;

  bool operator==(const QueryFamily&) const = default;

 private:
  std::vector<TestFunction> functions_;
};

// Returns `family` with the constant-one function prepended if it was
// missing; `added` reports whether that happened.
QueryFamily WithConstantOne(const QueryFamily& family, bool* added = nullptr);

// (<f, nu>)_{f in F}, indexed like the QueryFamily it was computed from.
using StatisticsVector = Eigen::VectorXd;

// Nonnegative weights summing to one over a support set.
class FiniteDensity {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Empty support; only useful as a placeholder before assignment.
  FiniteDensity() = default;
  FiniteDensity(Dataset support, Eigen::VectorXd weights);

  static FiniteDensity PointMass(Dataset support, std::size_t index);
  static FiniteDensity Uniform(Dataset support);

  const Dataset& support() const { return support_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }

 private:
  Dataset support_;
  Eigen::VectorXd weights_;
};

// (1/n) sum_i f(x_i).
double EvaluateStatistic(const TestFunction& f, const RecordSource& data);

// One pass over `data`; entry j is EvaluateStatistic(queries[j], data).
StatisticsVector EvaluateAll(const QueryFamily& queries,
                             const RecordSource& data);

// Entry j is sum_i queries[j](z_i) h(z_i).
StatisticsVector WeightedStatistics(const QueryFamily& queries,
                                    const FiniteDensity& h);

// max_f |<f, Y> - <f, X>|, in [0, 2].
double AccuracyError(const QueryFamily& queries, const RecordSource& x,
                     const RecordSource& y);

// Text format: first line holds comma-separated arities, every further line
// one point as comma-separated category indices.
Dataset ParseDataset(std::string_view text);
std::string FormatDataset(const Dataset& data);

// Comma-separated integer list; throws Error naming `what` on bad input.
std::vector<int> ParseIntList(std::string_view text, std::string_view what);

}  // namespace dpsynth

#endif  // DPSYNTH_CORE_H_
