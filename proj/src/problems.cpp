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

#include "nocg/problems.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace nocg {

void SmoothnessProfile::validate() const {
  // L may legitimately be zero (flat second order); B, G, D may not.
  if (!(B > 0.0) || !(G > 0.0) || !(D > 0.0) || !(L >= 0.0) || !(L2 >= 0.0))
    throw std::invalid_argument("invalid smoothness profile: need B, G, D > 0 and L, L2 >= 0");
}

double lbar(double B, double G, double L) {
  if (!(B > 0.0) || !(G > 0.0) || !(L >= 0.0))
    throw std::invalid_argument("lbar: need B > 0, G > 0, L >= 0");
  const double G4 = G * G * G * G;
  return std::sqrt(4.0 * B * B * G4 + 16.0 * G4 + 4.0 * L * L + 4.0 * B * B * L * L);
}

double lbar(const SmoothnessProfile& profile) {
  profile.validate();
  return lbar(profile.B, profile.G, profile.L);
}

McValue mc_value(const NonObliviousObjective& obj, const Vec& x, long n, const StreamSeq& seq) {
  if (n < 1) throw std::invalid_argument("mc_value: need n >= 1");
  check_dim(x, static_cast<size_t>(obj.dim()), "mc_value");
  double sum = 0.0;
  double sumsq = 0.0;
  for (long i = 0; i < n; ++i) {
    RngStream rng = seq.at(static_cast<uint64_t>(i));
    const double v = obj.sample(x, rng).value;
    sum += v;
    sumsq += v * v;
  }
  McValue out;
  out.n = n;
  out.mean = sum / static_cast<double>(n);
  if (n > 1) {
    const double var = std::max(0.0, (sumsq - sum * sum / n) / static_cast<double>(n - 1));
    out.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

GaussianPayoff GaussianPayoff::quadratic(Mat A, Vec b) {
  if (A.rows != A.cols) throw std::invalid_argument("quadratic payoff: A must be square");
  if (b.size() != static_cast<size_t>(A.rows))
    throw std::invalid_argument("quadratic payoff: dim(b) != dim(A)");
  for (int i = 0; i < A.rows; ++i)
    for (int j = i + 1; j < A.cols; ++j)
      if (std::abs(A(i, j) - A(j, i)) > 1e-12)
        throw std::invalid_argument("quadratic payoff: A must be symmetric");
  GaussianPayoff p;
  p.kind = Kind::Quadratic;
  p.A = std::move(A);
  p.b = std::move(b);
  return p;
}

namespace {

// p(z; x) = N(x, sigma^2 I). The payoff depends only on z, so the sampled
// x-gradient and x-Hessian of F_tilde vanish and the score term carries all
// the information: dlogp/dx = (z - x)/sigma^2, d2logp/dx2 = -I/sigma^2.
class GaussianFamily final : public NonObliviousObjective {
 public:
  GaussianFamily(int dim, double sigma, GaussianPayoff payoff)
      : dim_(dim), sigma_(sigma), payoff_(std::move(payoff)) {
    if (dim < 1) throw std::invalid_argument("gaussian family: dim >= 1 required");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian family: sigma must be positive");
    if (payoff_.kind == GaussianPayoff::Kind::Quadratic &&
        payoff_.A.rows != dim)
      throw std::invalid_argument("gaussian family: payoff dimension mismatch");
  }

  int dim() const override { return dim_; }

  StochasticSample sample(const Vec& x, RngStream& rng) const override {
    check_dim(x, static_cast<size_t>(dim_), "gaussian sample");
    auto z = std::make_shared<Vec>(x);
    for (int i = 0; i < dim_; ++i) (*z)[i] += sigma_ * rng.normal();
    StochasticSample s;
    s.payload = z;
    s.value = phi(*z);
    s.grad = Vec(static_cast<size_t>(dim_), 0.0);
    s.logp_grad = score(*z, x);
    s.has_second_order = true;
    return s;
  }

  Vec grad_at(const StochasticSample&, const Vec& y) const override {
    return Vec(y.size(), 0.0);
  }

  Vec logp_grad_at(const StochasticSample& z, const Vec& y) const override {
    return score(realization(z), y);
  }

  bool has_second_order() const override { return true; }

  Vec hess_vec(const StochasticSample&, const Vec&, const Vec& d) const override {
    return Vec(d.size(), 0.0);
  }

  Vec logp_hess_vec(const StochasticSample&, const Vec&, const Vec& d) const override {
    return scaled(d, -1.0 / (sigma_ * sigma_));
  }

  bool has_exact() const override { return true; }

  double exact_value(const Vec& x) const override {
    const double s2 = sigma_ * sigma_;
    if (payoff_.kind == GaussianPayoff::Kind::NegHalfSqNorm)
      return -0.5 * dot(x, x) - 0.5 * dim_ * s2;
    double trA = 0.0;
    for (int i = 0; i < dim_; ++i) trA += payoff_.A(i, i);
    return -0.5 * dot(x, matvec(payoff_.A, x)) + dot(payoff_.b, x) - 0.5 * s2 * trA;
  }

  Vec exact_grad(const Vec& x) const override {
    if (payoff_.kind == GaussianPayoff::Kind::NegHalfSqNorm) return scaled(x, -1.0);
    Vec g = matvec(payoff_.A, x);
    for (int i = 0; i < dim_; ++i) g[static_cast<size_t>(i)] =
        payoff_.b[static_cast<size_t>(i)] - g[static_cast<size_t>(i)];
    return g;
  }

  bool has_exact_hessian() const override { return true; }

  Mat exact_hessian(const Vec&) const override {
    Mat h(dim_, dim_);
    if (payoff_.kind == GaussianPayoff::Kind::NegHalfSqNorm) {
      for (int i = 0; i < dim_; ++i) h(i, i) = -1.0;
    } else {
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) h(i, j) = -payoff_.A(i, j);
    }
    return h;
  }

 private:
  static const Vec& realization(const StochasticSample& s) {
    return *static_cast<const Vec*>(s.payload.get());
  }

  double phi(const Vec& z) const {
    if (payoff_.kind == GaussianPayoff::Kind::NegHalfSqNorm) return -0.5 * dot(z, z);
    return -0.5 * dot(z, matvec(payoff_.A, z)) + dot(payoff_.b, z);
  }

  Vec score(const Vec& z, const Vec& y) const {
    Vec g(z.size());
    const double inv_s2 = 1.0 / (sigma_ * sigma_);
    for (size_t i = 0; i < z.size(); ++i) g[i] = (z[i] - y[i]) * inv_s2;
    return g;
  }

  int dim_;
  double sigma_;
  GaussianPayoff payoff_;
};

// Point-mass distribution: every sample evaluates the same deterministic
// quadratic, making the family oblivious with zero score.
class DeterministicQuadratic final : public NonObliviousObjective {
 public:
  DeterministicQuadratic(Mat A, Vec b, double c)
      : dim_(A.rows), A_(std::move(A)), b_(std::move(b)), c_(c) {
    if (A_.rows != A_.cols || b_.size() != static_cast<size_t>(A_.rows))
      throw std::invalid_argument("deterministic quadratic: inconsistent dimensions");
  }

  int dim() const override { return dim_; }

  StochasticSample sample(const Vec& x, RngStream&) const override {
    check_dim(x, static_cast<size_t>(dim_), "quadratic sample");
    StochasticSample s;
    s.value = exact_value(x);
    s.grad = exact_grad(x);
    s.logp_grad = Vec(static_cast<size_t>(dim_), 0.0);
    s.has_second_order = true;
    return s;
  }

  Vec grad_at(const StochasticSample&, const Vec& y) const override { return exact_grad(y); }

  Vec logp_grad_at(const StochasticSample&, const Vec& y) const override {
    return Vec(y.size(), 0.0);
  }

  bool has_second_order() const override { return true; }

  Vec hess_vec(const StochasticSample&, const Vec&, const Vec& d) const override {
    return scaled(matvec(A_, d), -1.0);
  }

  Vec logp_hess_vec(const StochasticSample&, const Vec&, const Vec& d) const override {
    return Vec(d.size(), 0.0);
  }

  bool has_exact() const override { return true; }

  double exact_value(const Vec& x) const override {
    return -0.5 * dot(x, matvec(A_, x)) + dot(b_, x) + c_;
  }

  Vec exact_grad(const Vec& x) const override {
    Vec g = matvec(A_, x);
    for (size_t i = 0; i < g.size(); ++i) g[i] = b_[i] - g[i];
    return g;
  }

  bool has_exact_hessian() const override { return true; }

  Mat exact_hessian(const Vec&) const override {
    Mat h(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) h(i, j) = -A_(i, j);
    return h;
  }

 private:
  int dim_;
  Mat A_;
  Vec b_;
  double c_;
};

}  // namespace

std::unique_ptr<NonObliviousObjective> make_gaussian_family(int dim, double sigma,
                                                            const GaussianPayoff& payoff) {
  return std::make_unique<GaussianFamily>(dim, sigma, payoff);
}

std::unique_ptr<NonObliviousObjective> make_deterministic_quadratic(Mat A, Vec b, double c) {
  return std::make_unique<DeterministicQuadratic>(std::move(A), std::move(b), c);
}

DrSubmodularityReport check_dr_submodular(const NonObliviousObjective& obj,
                                          const std::vector<Vec>& grid, double tol) {
  DrSubmodularityReport report;
  report.worst_cross_partial = -std::numeric_limits<double>::infinity();
  const int d = obj.dim();
  const double h = 1e-5;
  for (const Vec& x : grid) {
    Mat hess;
    if (obj.has_exact_hessian()) {
      hess = obj.exact_hessian(x);
    } else if (obj.has_exact()) {
      // Central differences of the exact gradient, column by column.
      hess = Mat(d, d);
      for (int j = 0; j < d; ++j) {
        Vec xp = x, xm = x;
        xp[static_cast<size_t>(j)] += h;
        xm[static_cast<size_t>(j)] -= h;
        const Vec gp = obj.exact_grad(xp);
        const Vec gm = obj.exact_grad(xm);
        for (int i = 0; i < d; ++i)
          hess(i, j) = (gp[static_cast<size_t>(i)] - gm[static_cast<size_t>(i)]) / (2.0 * h);
      }
    } else {
      throw UnsupportedOperation(
          "check_dr_submodular: objective exposes neither an exact Hessian nor an exact gradient");
    }
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (i == j) continue;
        if (hess(i, j) > report.worst_cross_partial) {
          report.worst_cross_partial = hess(i, j);
          report.worst_i = i;
          report.worst_j = j;
          report.worst_point = x;
        }
      }
    }
  }
  report.pass = report.worst_cross_partial <= tol;
  return report;
}

}  // namespace nocg
