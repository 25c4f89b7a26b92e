// Copyright 2025 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOCG_ESTIMATORS_HPP
#define NOCG_ESTIMATORS_HPP

#include <functional>
#include <vector>

#include "nocg/problems.hpp"
#include "nocg/rng.hpp"
#include "nocg/vec.hpp"

namespace nocg {

// One sample of the segment between consecutive iterates: a uniform position
// a on [0,1], the blended point x(a), and a realization drawn at x(a).
struct PathSample {
  double a = 0.0;
  Vec x_of_a;
  StochasticSample z;
};

// Running variance-reduced gradient estimate: the anchor batch mean plus the
// telescoped path-difference updates since the anchor.
struct GradientEstimate {
  Vec g;
  int anchor_iter = 0;
  long oracle_calls = 0;
};

// How Hessian-vector products inside the path estimator are evaluated.
struct HvpMethod {
  enum class Kind { ExactSecondOrder, FiniteDifference };
  Kind kind = Kind::ExactSecondOrder;
  double delta = 1e-4;  // FiniteDifference only, > 0

  static HvpMethod exact() { return HvpMethod{Kind::ExactSecondOrder, 0.0}; }
  static HvpMethod finite_difference(double delta);
};

// Unbiased sampled Hessian of F at y, materialized as a d x d matrix:
//   F~ (glp)(glp)' + (gF~)(glp)' + (glp)(gF~)' + H_F~ + F~ H_logp
// evaluated at (y, z) with z drawn at y. Requires second-order oracles;
// intended for tests and diagnostics (d <= 32).
Mat hessian_estimate(const NonObliviousObjective& obj, const Vec& y, const StochasticSample& z);

// Action form of the same estimator, H_hat(y; z) * d, in O(d) plus two
// second-order oracle actions.
Vec hessian_estimate_vec(const NonObliviousObjective& obj, const Vec& y,
                         const StochasticSample& z, const Vec& d_vec);

// Draws m independent (a, z(a)) tuples along the segment x_prev -> x_cur.
std::vector<PathSample> sample_path_batch(const NonObliviousObjective& obj, const Vec& x_prev,
                                          const Vec& x_cur, long m, const StreamSeq& seq);

// Batch-mean Hessian action on d_vec = x_cur - x_prev; unbiased for
// grad F(x_cur) - grad F(x_prev). Summation runs in sample-index order.
Vec delta_exact(const NonObliviousObjective& obj, const std::vector<PathSample>& batch,
                const Vec& d_vec);

// Central difference (grad(y + delta d) - grad(y - delta d)) / (2 delta).
Vec hvp_fd(const std::function<Vec(const Vec&)>& grad_oracle, const Vec& y, const Vec& d_vec,
           double delta);

// First-order-only variant of delta_exact: the three rank-one terms are kept
// exact and the two Hessian actions are replaced by central differences of
// the per-sample gradients. Converges to delta_exact as delta -> 0.
Vec xi_delta(const NonObliviousObjective& obj, const std::vector<PathSample>& batch,
             const Vec& d_vec, double delta);

// g <- g + delta_tilde, advancing the telescoped estimate.
GradientEstimate update_gradient_estimate(GradientEstimate est, const Vec& delta_tilde);

// Batch mean of the per-sample unbiased gradient F~ * glogp + gF~ at x.
GradientEstimate anchor_gradient(const NonObliviousObjective& obj, const Vec& x, long m,
                                 const StreamSeq& seq, int anchor_iter = 0);

}  // namespace nocg

#endif  // NOCG_ESTIMATORS_HPP
