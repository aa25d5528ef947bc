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

#include "dpsynth/queries.h"

#include <cmath>
#include <numbers>
#include <regex>
#include <string>

#include "dpsynth/random.h"

namespace dpsynth {
namespace {

// Calls visit(S) for every S subset of {0..p-1} with |S| = size, in
// lexicographic order.
template <typename Visit>
void ForEachSubset(int p, int size, Visit&& visit) {
  std::vector<int> s(size);
  for (int i = 0; i < size; ++i) s[i] = i;
  while (true) {
    visit(s);
    int i = size - 1;
    while (i >= 0 && s[i] == p - size + i) --i;
    if (i < 0) return;
    ++s[i];
    for (int j = i + 1; j < size; ++j) s[j] = s[j - 1] + 1;
  }
}

std::string_view TrimView(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::uint64_t Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // Exact: result * (n - k + i) is divisible by i at every step.
    result = result * static_cast<std::uint64_t>(n - k + i) /
             static_cast<std::uint64_t>(i);
  }
  return result;
}

QueryFamily MarginalFamily(const Schema& schema, int d, MarginalKind kind) {
  const int p = schema.dimension();
  if (d < 0) throw Error("marginal degree must be nonnegative");
  if (d > p) throw Error("marginal degree d exceeds dimension p");
  if (kind == MarginalKind::kMonotone && !schema.IsBoolean()) {
    throw Error("monotone marginals require a Boolean schema");
  }
  QueryFamily family;
  family.Append(TestFunction::ConstantOne());
  for (int size = 1; size <= d; ++size) {
    ForEachSubset(p, size, [&](const std::vector<int>& s) {
      if (kind == MarginalKind::kMonotone) {
        family.Append(TestFunction::Monotone(s));
        return;
      }
      std::vector<int> values(s.size(), 0);
      while (true) {
        family.Append(TestFunction::Assignment(s, values));
        int i = static_cast<int>(s.size()) - 1;
        while (i >= 0 && values[i] == schema.arity(s[i]) - 1) values[i--] = 0;
        if (i < 0) break;
        ++values[i];
      }
    });
  }
  return family;
}

QueryFamily MarginalFamily(int p, int d, MarginalKind kind) {
  return MarginalFamily(Schema::Boolean(p), d, kind);
}

FamilySizeBound MarginalCountBound(int p, int d) {
  if (d < 0 || d > p) throw Error("need 0 <= d <= p");
  if (d == 0) return {1, 1.0};
  std::uint64_t exact = 0;
  for (int j = 0; j <= d; ++j) exact += Binomial(p, j);
  const double bound = std::pow(std::numbers::e * p / d, d);
  return {exact, bound};
}

void CheckRange(const QueryFamily& family, const Schema& schema,
                std::uint64_t max_enumerated, int samples) {
  family.CheckConforms(schema);
  auto check = [&](const DataPoint& x) {
    for (const auto& f : family) {
      const double v = f(x);
      if (!(v >= -1.0 && v <= 1.0)) {
        throw Error(f.Describe() + ": value outside [-1, 1]");
      }
    }
  };
  const auto size = schema.DomainSize();
  if (size && *size <= max_enumerated) {
    for (std::uint64_t i = 0; i < *size; ++i) check(schema.PointAt(i));
    return;
  }
  Rng rng(0x5eed);
  std::vector<int> values(schema.dimension());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < schema.dimension(); ++i) {
      values[i] = static_cast<int>(rng.Next() %
                                   static_cast<std::uint64_t>(schema.arity(i)));
    }
    check(DataPoint(values));
  }
}

QueryFamily ParseQuerySpec(std::string_view text, const Schema& schema,
                           bool add_constant_one) {
  static const std::regex kMarginals(
      R"(^marginals(?:\s+(monotone|assignment))?\s+d\s*=\s*(\d+)$)");
  static const std::regex kIndicator(
      R"(^indicator\s+S\s*=\s*[{(]?\s*([0-9,\s]*?)\s*[})]?\s*,?)"
      R"(\s+values\s*=\s*[{(]?\s*([0-9,\s]*?)\s*[})]?$)");

  QueryFamily family;
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
    line = TrimView(line);
    if (line.empty()) continue;

    const std::string where = "query spec line " + std::to_string(line_number);
    const std::string owned(line);
    std::smatch match;
    QueryFamily parsed;
    try {
      if (std::regex_match(owned, match, kMarginals)) {
        // Monotone unless stated otherwise.
        const auto kind = match[1] == "assignment" ? MarginalKind::kAssignment
                                                   : MarginalKind::kMonotone;
        parsed = MarginalFamily(schema, std::stoi(match[2]), kind);
      } else if (std::regex_match(owned, match, kIndicator)) {
        std::vector<int> coords = ParseIntList(match[1].str(), "S");
        for (int& c : coords) {
          if (c < 1) throw Error("coordinates are one-based");
          --c;
        }
        parsed.Append(TestFunction::Assignment(
            std::move(coords), ParseIntList(match[2].str(), "values")));
      } else {
        throw Error("unrecognized directive '" + owned + "'");
      }
      CheckRange(parsed, schema);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    } catch (const std::out_of_range&) {
      throw Error(where + ": degree out of range");
    }
    // A second marginals directive must not repeat the constant function.
    const bool has_constant = family.ContainsConstantOne();
    for (const auto& f : parsed) {
      if (has_constant && f.kind() == TestFunction::Kind::kConstantOne)
        continue;
      family.Append(f);
    }
  }
  if (add_constant_one) family = WithConstantOne(family);
  return family;
}

}  // namespace dpsynth
