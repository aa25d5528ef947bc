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

// Revised primal simplex for the sup-norm fit over the probability simplex:
//
//   minimize t  subject to  -t <= (A h - b)_j <= t  for every row j,
//                           h >= 0,  sum_i h_i = 1.
//
// In standard form, with one slack per inequality, the rows are
//
//   row j       (0 <= j < F):   A_j h - t + s_j      =  b_j
//   row F + j   (0 <= j < F):  -A_j h - t + s_{F+j}  = -b_j
//   row 2F:                     sum_i h_i            =  1
//
// and the columns are ordered h_0..h_{M-1}, t, s_0..s_{2F-1}. The basis has
// 2F + 1 columns regardless of M, so each iteration costs one F x M product
// for pricing plus O(F^2) for the basis inverse update.
//
// The start is the vertex h = e_0, t = max residual: basic columns are h_0,
// t and every slack except the one of the tightest row. No phase one is
// needed since every density is feasible.
//
// Pricing is Dantzig's rule with the lowest column index winning ties. After
// `degeneracy_limit` consecutive zero-length steps the solver switches to
// Bland's rule until it makes progress again.

#ifndef DPSYNTH_DETAIL_CHEBYSHEV_SIMPLEX_H_
#define DPSYNTH_DETAIL_CHEBYSHEV_SIMPLEX_H_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace dpsynth {
namespace detail {

template <typename Scalar>
struct ChebyshevSimplexOptions {
  Scalar pivot_tolerance = Scalar(1e-9);
  Scalar reduced_cost_tolerance = Scalar(1e-9);
  // Zero-length step threshold for the degeneracy counter.
  Scalar degenerate_step = Scalar(1e-12);
  int degeneracy_limit = 50;
  int refactor_interval = 64;
  // <= 0 selects 50 * (rows + columns).
  std::int64_t max_iterations = 0;
};

template <typename Scalar>
struct ChebyshevSimplexResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
  // Value of t at the final basis.
  Scalar t = Scalar(0);
  std::int64_t iterations = 0;
  bool optimal = false;
};

template <typename Scalar>
class ChebyshevSimplex {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ChebyshevSimplex(const Matrix& values, const Vector& targets,
                   const ChebyshevSimplexOptions<Scalar>& options)
      : a_(values),
        b_(targets),
        options_(options),
        f_(values.rows()),
        m_(values.cols()),
        rows_(2 * f_ + 1) {}

  ChebyshevSimplexResult<Scalar> Solve() {
    InitialBasis();
    Refactor();

    const std::int64_t limit =
        options_.max_iterations > 0
            ? options_.max_iterations
            : 50 * static_cast<std::int64_t>(rows_ + ColumnCount());
    ChebyshevSimplexResult<Scalar> result;
    int degenerate_run = 0;
    bool bland = false;
    std::int64_t since_refactor = 0;

    while (true) {
      const Eigen::Index entering = Price(bland);
      if (entering < 0) {
        result.optimal = true;
        break;
      }
      if (result.iterations >= limit) break;

      const Vector direction = inverse_ * Column(entering);
      const Eigen::Index leaving = RatioTest(direction, bland);
      if (leaving < 0) {
        // Unbounded directions cannot exist (t >= 0 bounds the objective);
        // this only happens through accumulated rounding.
        if (since_refactor == 0) break;
        Refactor();
        since_refactor = 0;
        continue;
      }

      const Scalar step = x_[leaving] / direction[leaving];
      Pivot(entering, leaving, direction, step);
      ++result.iterations;

      if (step <= options_.degenerate_step) {
        if (++degenerate_run >= options_.degeneracy_limit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      if (++since_refactor >= options_.refactor_interval) {
        Refactor();
        since_refactor = 0;
      }
    }

    result.weights = Vector::Zero(m_);
    for (Eigen::Index k = 0; k < rows_; ++k) {
      const Eigen::Index column = basis_[k];
      if (column < m_) result.weights[column] = x_[k];
      if (column == m_) result.t = x_[k];
    }
    return result;
  }

 private:
  Eigen::Index ColumnCount() const { return m_ + 1 + 2 * f_; }
  Eigen::Index TColumn() const { return m_; }
  Eigen::Index SlackColumn(Eigen::Index row) const { return m_ + 1 + row; }

  Vector Column(Eigen::Index column) const {
    Vector c = Vector::Zero(rows_);
    if (column < m_) {
      c.head(f_) = a_.col(column);
      c.segment(f_, f_) = -a_.col(column);
      c[2 * f_] = Scalar(1);
    } else if (column == TColumn()) {
      c.head(2 * f_).setConstant(Scalar(-1));
    } else {
      c[column - m_ - 1] = Scalar(1);
    }
    return c;
  }

  Vector RightHandSide() const {
    Vector rhs(rows_);
    rhs.head(f_) = b_;
    rhs.segment(f_, f_) = -b_;
    rhs[2 * f_] = Scalar(1);
    return rhs;
  }

  void InitialBasis() {
    basis_.assign(static_cast<std::size_t>(rows_), -1);
    is_basic_.assign(static_cast<std::size_t>(ColumnCount()), false);
    if (f_ == 0) {
      SetBasic(0, 0);
      return;
    }
    // Tightest row at h = e_0; lowest index on ties.
    Eigen::Index tight = 0;
    Scalar worst = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index r = 0; r < 2 * f_; ++r) {
      const Scalar residual = a_(r % f_, 0) - b_[r % f_];
      const Scalar signed_residual = r < f_ ? residual : -residual;
      if (signed_residual > worst) {
        worst = signed_residual;
        tight = r;
      }
    }
    // Position `tight` carries t, the sum row carries h_0, the others keep
    // their slacks.
    for (Eigen::Index r = 0; r < 2 * f_; ++r) {
      SetBasic(r, r == tight ? TColumn() : SlackColumn(r));
    }
    SetBasic(2 * f_, 0);
  }

  void SetBasic(Eigen::Index position, Eigen::Index column) {
    if (basis_[position] >= 0) is_basic_[basis_[position]] = false;
    basis_[position] = column;
    is_basic_[column] = true;
  }

  void Refactor() {
    Matrix basis_matrix(rows_, rows_);
    for (Eigen::Index k = 0; k < rows_; ++k) {
      basis_matrix.col(k) = Column(basis_[k]);
    }
    inverse_ = basis_matrix.partialPivLu().inverse();
    x_ = inverse_ * RightHandSide();
    for (Eigen::Index k = 0; k < rows_; ++k) {
      if (x_[k] < Scalar(0) && x_[k] > -options_.pivot_tolerance) {
        x_[k] = Scalar(0);
      }
    }
  }

  // Entering column, or -1 at optimality.
  Eigen::Index Price(bool bland) const {
    // Duals y = B^{-T} c_B with c = e_t.
    Vector y = Vector::Zero(rows_);
    for (Eigen::Index k = 0; k < rows_; ++k) {
      if (basis_[k] == TColumn()) y = inverse_.row(k).transpose();
    }
    const Vector dual_difference = y.head(f_) - y.segment(f_, f_);
    const Vector point_costs =
        -(a_.transpose() * dual_difference).array() - y[2 * f_];

    const Scalar threshold = -options_.reduced_cost_tolerance;
    Eigen::Index best = -1;
    Scalar best_cost = threshold;
    auto consider = [&](Eigen::Index column, Scalar cost) {
      if (is_basic_[column] || !(cost < threshold)) return false;
      if (bland) {
        best = column;
        return true;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = column;
      }
      return false;
    };
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (consider(i, point_costs[i])) return best;
    }
    if (consider(TColumn(), Scalar(1) + y.head(2 * f_).sum())) return best;
    for (Eigen::Index r = 0; r < 2 * f_; ++r) {
      if (consider(SlackColumn(r), -y[r])) return best;
    }
    return best;
  }

  // Leaving basis position, or -1 if the direction is unbounded.
  Eigen::Index RatioTest(const Vector& direction, bool bland) const {
    Eigen::Index leaving = -1;
    Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
    constexpr Scalar kTie = Scalar(1e-12);
    for (Eigen::Index k = 0; k < rows_; ++k) {
      if (!(direction[k] > options_.pivot_tolerance)) continue;
      const Scalar ratio = std::max(x_[k], Scalar(0)) / direction[k];
      if (leaving < 0 || ratio < best_ratio - kTie) {
        leaving = k;
        best_ratio = ratio;
        continue;
      }
      if (ratio <= best_ratio + kTie) {
        const bool better = bland ? basis_[k] < basis_[leaving]
                                  : direction[k] > direction[leaving];
        if (better) {
          leaving = k;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    return leaving;
  }

  void Pivot(Eigen::Index entering, Eigen::Index leaving,
             const Vector& direction, Scalar step) {
    step = std::max(step, Scalar(0));
    x_ -= step * direction;
    x_[leaving] = step;

    const Scalar pivot = direction[leaving];
    inverse_.row(leaving) /= pivot;
    for (Eigen::Index k = 0; k < rows_; ++k) {
      if (k == leaving || direction[k] == Scalar(0)) continue;
      inverse_.row(k) -= direction[k] * inverse_.row(leaving);
    }
    SetBasic(leaving, entering);
  }

  const Matrix& a_;
  const Vector& b_;
  ChebyshevSimplexOptions<Scalar> options_;
  Eigen::Index f_;
  Eigen::Index m_;
  Eigen::Index rows_;

  std::vector<Eigen::Index> basis_;
  std::vector<bool> is_basic_;
  Matrix inverse_;
  Vector x_;
};

}  // namespace detail
}  // namespace dpsynth

#endif  // DPSYNTH_DETAIL_CHEBYSHEV_SIMPLEX_H_
