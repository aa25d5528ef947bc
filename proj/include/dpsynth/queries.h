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

#ifndef DPSYNTH_QUERIES_H_
#define DPSYNTH_QUERIES_H_

#include <cstdint>
#include <string_view>

#include "dpsynth/core.h"

namespace dpsynth {

enum class MarginalKind {
  // prod_{i in S} x(i) for every |S| <= d; S = {} is the constant one.
  kMonotone,
  // 1{x(S) = v} for every 1 <= |S| <= d and every assignment v, plus the
  // constant one.
  kAssignment,
};

// All marginals of degree at most d, ordered by |S|, then S
// lexicographically, then the assigned values lexicographically.
// Monotone families require a Boolean schema.
QueryFamily MarginalFamily(const Schema& schema, int d, MarginalKind kind);

// Boolean cube {0,1}^p.
QueryFamily MarginalFamily(int p, int d, MarginalKind kind);

struct FamilySizeBound {
  std::uint64_t exact;  // sum_{j <= d} C(p, j)
  double bound;         // (e p / d)^d, and 1 for d = 0
};

FamilySizeBound MarginalCountBound(int p, int d);

std::uint64_t Binomial(int n, int k);

// Parses the query-spec format:
//
//   # comment
//   marginals monotone d=2
//   marginals d=2                (kind defaults to monotone)
//   marginals assignment d=1
//   indicator S={1,2,3} values=(1,1,0)
//
// Coordinates in the text are one-based. Functions are appended in line
// order. When `add_constant_one` is set and no directive produced the
// constant function, it is prepended. Errors name the offending line.
QueryFamily ParseQuerySpec(std::string_view text, const Schema& schema,
                           bool add_constant_one = true);

// Verifies that every function of `family` maps the schema into [-1, 1],
// exhaustively when the domain has at most `max_enumerated` points and on
// `samples` pseudo-random points otherwise.
void CheckRange(const QueryFamily& family, const Schema& schema,
                std::uint64_t max_enumerated = std::uint64_t{1} << 16,
                int samples = 4096);

}  // namespace dpsynth

#endif  // DPSYNTH_QUERIES_H_
