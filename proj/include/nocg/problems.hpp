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

#ifndef NOCG_PROBLEMS_HPP
#define NOCG_PROBLEMS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "nocg/errors.hpp"
#include "nocg/rng.hpp"
#include "nocg/vec.hpp"

namespace nocg {

// One realization z drawn at a query point x, together with the quantities
// every first-order estimator needs at the draw point. The payload keeps z
// itself around so the owning objective can re-evaluate its per-sample
// oracles at perturbed points or apply second-order actions.
struct StochasticSample {
  std::shared_ptr<const void> payload;
  double value = 0.0;    // F_tilde(x; z)
  Vec grad;              // d/dx F_tilde(x; z)
  Vec logp_grad;         // d/dx log p(z; x)
  bool has_second_order = false;
};

// A stochastic objective F(x) = E_{z ~ p(z; x)} [F_tilde(x; z)] where the
// sampling distribution itself depends on x. Families used in tests also
// carry exact oracles so statistical checks always compare Monte-Carlo
// quantities against analytic values, never against each other.
class NonObliviousObjective {
 public:
  virtual ~NonObliviousObjective() = default;

  virtual int dim() const = 0;

  // Draws z ~ p(z; x) and evaluates the sampled value and gradients at x.
  virtual StochasticSample sample(const Vec& x, RngStream& rng) const = 0;

  // Per-sample re-evaluation of the smooth components at an arbitrary point,
  // holding the realization z fixed. Required by the finite-difference
  // Hessian-vector path.
  virtual Vec grad_at(const StochasticSample& z, const Vec& y) const = 0;
  virtual Vec logp_grad_at(const StochasticSample& z, const Vec& y) const = 0;

  // Second-order actions d -> H d, available for families with closed-form
  // Hessians. Callers fall back to finite differences when absent.
  virtual bool has_second_order() const { return false; }
  virtual Vec hess_vec(const StochasticSample& /*z*/, const Vec& /*y*/, const Vec& /*d*/) const {
    throw UnsupportedOperation("objective has no second-order oracle for F_tilde");
  }
  virtual Vec logp_hess_vec(const StochasticSample& /*z*/, const Vec& /*y*/,
                            const Vec& /*d*/) const {
    throw UnsupportedOperation("objective has no second-order oracle for log p");
  }

  // Exact oracles, present on closed-form test families only.
  virtual bool has_exact() const { return false; }
  virtual double exact_value(const Vec& /*x*/) const {
    throw UnsupportedOperation("objective has no exact value oracle");
  }
  virtual Vec exact_grad(const Vec& /*x*/) const {
    throw UnsupportedOperation("objective has no exact gradient oracle");
  }
  virtual bool has_exact_hessian() const { return false; }
  virtual Mat exact_hessian(const Vec& /*x*/) const {
    throw UnsupportedOperation("objective has no exact Hessian oracle");
  }
};

// Problem constants supplied per instance: bound B on |F_tilde|, gradient
// moment bound G, Hessian spectral bound L, Hessian Lipschitz constant L2,
// and the feasible-region diameter D.
struct SmoothnessProfile {
  double B = 1.0;
  double G = 1.0;
  double L = 1.0;
  double L2 = 0.0;
  double D = 1.0;

  void validate() const;
};

// sqrt(4 B^2 G^4 + 16 G^4 + 4 L^2 + 4 B^2 L^2), the spectral-moment bound on
// the sampled Hessian estimator; drives every step-size and batch schedule.
double lbar(double B, double G, double L);
double lbar(const SmoothnessProfile& profile);

struct McValue {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
};

// Monte-Carlo estimate of F(x) from n fresh samples, with its standard error.
McValue mc_value(const NonObliviousObjective& obj, const Vec& x, long n, const StreamSeq& seq);

// p(z; x) = N(x, sigma^2 I) with a payoff that depends only on z, so the
// per-sample x-gradient vanishes and all the action is in the score term.
struct GaussianPayoff {
  enum class Kind { NegHalfSqNorm, Quadratic };
  Kind kind = Kind::NegHalfSqNorm;
  // phi(z) = -z'Az/2 + b'z for the quadratic payoff; A must be symmetric.
  Mat A;
  Vec b;

  static GaussianPayoff neg_half_sq_norm() { return GaussianPayoff{}; }
  static GaussianPayoff quadratic(Mat A, Vec b);
};

std::unique_ptr<NonObliviousObjective> make_gaussian_family(int dim, double sigma,
                                                            const GaussianPayoff& payoff);

// Degenerate point-mass distribution: F_tilde(x; z0) = -x'Ax/2 + b'x + c
// deterministically. Used as the oblivious / exact-oracle test family.
std::unique_ptr<NonObliviousObjective> make_deterministic_quadratic(Mat A, Vec b, double c);

struct DrSubmodularityReport {
  bool pass = false;
  double worst_cross_partial = 0.0;  // max over grid points and i != j
  int worst_i = -1;
  int worst_j = -1;
  Vec worst_point;
};

// Checks d2F/dx_i dx_j <= tol for all i != j at each grid point, using the
// exact Hessian when available and central differences of the exact gradient
// otherwise.
DrSubmodularityReport check_dr_submodular(const NonObliviousObjective& obj,
                                          const std::vector<Vec>& grid, double tol);

}  // namespace nocg

#endif  // NOCG_PROBLEMS_HPP
