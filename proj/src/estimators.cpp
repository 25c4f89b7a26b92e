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

#include "nocg/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "nocg/parallel.hpp"

namespace nocg {

HvpMethod HvpMethod::finite_difference(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("finite difference: delta must be positive");
  return HvpMethod{Kind::FiniteDifference, delta};
}

Mat hessian_estimate(const NonObliviousObjective& obj, const Vec& y, const StochasticSample& z) {
  if (!obj.has_second_order())
    throw UnsupportedOperation("hessian_estimate: second-order oracles unavailable");
  const int d = obj.dim();
  check_dim(y, static_cast<size_t>(d), "hessian_estimate");
  Mat h(d, d);
  // Rank-one part: F~ (glp)(glp)' + (gF~)(glp)' + (glp)(gF~)'.
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const size_t si = static_cast<size_t>(i), sj = static_cast<size_t>(j);
      h(i, j) = z.value * z.logp_grad[si] * z.logp_grad[sj] + z.grad[si] * z.logp_grad[sj] +
                z.logp_grad[si] * z.grad[sj];
    }
  }
  // Curvature part, materialized column by column through the actions.
  Vec e(static_cast<size_t>(d), 0.0);
  for (int j = 0; j < d; ++j) {
    e[static_cast<size_t>(j)] = 1.0;
    const Vec hf = obj.hess_vec(z, y, e);
    const Vec hp = obj.logp_hess_vec(z, y, e);
    for (int i = 0; i < d; ++i)
      h(i, j) += hf[static_cast<size_t>(i)] + z.value * hp[static_cast<size_t>(i)];
    e[static_cast<size_t>(j)] = 0.0;
  }
  return h;
}

Vec hessian_estimate_vec(const NonObliviousObjective& obj, const Vec& y,
                         const StochasticSample& z, const Vec& d_vec) {
  if (!obj.has_second_order())
    throw UnsupportedOperation("hessian_estimate_vec: second-order oracles unavailable");
  const size_t d = static_cast<size_t>(obj.dim());
  check_dim(d_vec, d, "hessian_estimate_vec");
  const double lp_d = dot(z.logp_grad, d_vec);
  const double gf_d = dot(z.grad, d_vec);
  Vec out(d, 0.0);
  axpy(z.value * lp_d, z.logp_grad, out);
  axpy(lp_d, z.grad, out);
  axpy(gf_d, z.logp_grad, out);
  axpy(1.0, obj.hess_vec(z, y, d_vec), out);
  axpy(z.value, obj.logp_hess_vec(z, y, d_vec), out);
  return out;
}

std::vector<PathSample> sample_path_batch(const NonObliviousObjective& obj, const Vec& x_prev,
                                          const Vec& x_cur, long m, const StreamSeq& seq) {
  if (m < 1) throw std::invalid_argument("sample_path_batch: need m >= 1");
  const size_t d = static_cast<size_t>(obj.dim());
  check_dim(x_prev, d, "sample_path_batch");
  check_dim(x_cur, d, "sample_path_batch");
  std::vector<PathSample> batch(static_cast<size_t>(m));
  parallel_for_indexed(m, [&](int64_t i) {
    RngStream rng = seq.at(static_cast<uint64_t>(i));
    PathSample& ps = batch[static_cast<size_t>(i)];
    ps.a = rng.uniform01();
    ps.x_of_a = convex_combination(x_prev, x_cur, ps.a);
    ps.z = obj.sample(ps.x_of_a, rng);
  });
  return batch;
}

namespace {

// Evaluates per-sample contributions into an indexed buffer and reduces in
// sample order, so thread count never changes the result.
Vec batch_mean(size_t d, size_t m, const std::function<void(size_t, double*)>& fill) {
  std::vector<double> buffer(d * m);
  parallel_for_indexed(static_cast<int64_t>(m),
                       [&](int64_t i) { fill(static_cast<size_t>(i), &buffer[d * i]); });
  Vec mean(d, 0.0);
  for (size_t i = 0; i < m; ++i)
    for (size_t c = 0; c < d; ++c) mean[c] += buffer[d * i + c];
  const double inv = 1.0 / static_cast<double>(m);
  for (double& v : mean) v *= inv;
  return mean;
}

}  // namespace

Vec delta_exact(const NonObliviousObjective& obj, const std::vector<PathSample>& batch,
                const Vec& d_vec) {
  if (batch.empty()) throw std::invalid_argument("delta_exact: empty batch");
  const size_t d = static_cast<size_t>(obj.dim());
  check_dim(d_vec, d, "delta_exact");
  return batch_mean(d, batch.size(), [&](size_t i, double* out) {
    const Vec v = hessian_estimate_vec(obj, batch[i].x_of_a, batch[i].z, d_vec);
    for (size_t c = 0; c < d; ++c) out[c] = v[c];
  });
}

Vec hvp_fd(const std::function<Vec(const Vec&)>& grad_oracle, const Vec& y, const Vec& d_vec,
           double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("hvp_fd: delta must be positive");
  check_dim(d_vec, y.size(), "hvp_fd");
  Vec yp = y, ym = y;
  axpy(delta, d_vec, yp);
  axpy(-delta, d_vec, ym);
  Vec g = grad_oracle(yp);
  const Vec gm = grad_oracle(ym);
  const double inv = 1.0 / (2.0 * delta);
  for (size_t i = 0; i < g.size(); ++i) g[i] = (g[i] - gm[i]) * inv;
  return g;
}

Vec xi_delta(const NonObliviousObjective& obj, const std::vector<PathSample>& batch,
             const Vec& d_vec, double delta) {
  if (batch.empty()) throw std::invalid_argument("xi_delta: empty batch");
  if (!(delta > 0.0)) throw std::invalid_argument("xi_delta: delta must be positive");
  const size_t d = static_cast<size_t>(obj.dim());
  check_dim(d_vec, d, "xi_delta");
  return batch_mean(d, batch.size(), [&](size_t i, double* out) {
    const PathSample& ps = batch[i];
    const double lp_d = dot(ps.z.logp_grad, d_vec);
    const double gf_d = dot(ps.z.grad, d_vec);
    Vec v(d, 0.0);
    axpy(ps.z.value * lp_d, ps.z.logp_grad, v);
    axpy(lp_d, ps.z.grad, v);
    axpy(gf_d, ps.z.logp_grad, v);
    // Central differences stand in for the two Hessian actions; the log p
    // difference keeps its F~ multiplier so the delta -> 0 limit matches
    // the exact estimator.
    const Vec fd_f =
        hvp_fd([&](const Vec& y) { return obj.grad_at(ps.z, y); }, ps.x_of_a, d_vec, delta);
    const Vec fd_p =
        hvp_fd([&](const Vec& y) { return obj.logp_grad_at(ps.z, y); }, ps.x_of_a, d_vec, delta);
    axpy(1.0, fd_f, v);
    axpy(ps.z.value, fd_p, v);
    for (size_t c = 0; c < d; ++c) out[c] = v[c];
  });
}

GradientEstimate update_gradient_estimate(GradientEstimate est, const Vec& delta_tilde) {
  check_dim(delta_tilde, est.g.size(), "update_gradient_estimate");
  axpy(1.0, delta_tilde, est.g);
  return est;
}

GradientEstimate anchor_gradient(const NonObliviousObjective& obj, const Vec& x, long m,
                                 const StreamSeq& seq, int anchor_iter) {
  if (m < 1) throw std::invalid_argument("anchor_gradient: need m >= 1");
  const size_t d = static_cast<size_t>(obj.dim());
  check_dim(x, d, "anchor_gradient");
  GradientEstimate est;
  est.anchor_iter = anchor_iter;
  est.oracle_calls = m;
  est.g = batch_mean(d, static_cast<size_t>(m), [&](size_t i, double* out) {
    RngStream rng = seq.at(static_cast<uint64_t>(i));
    const StochasticSample z = obj.sample(x, rng);
    for (size_t c = 0; c < d; ++c) out[c] = z.value * z.logp_grad[c] + z.grad[c];
  });
  return est;
}

}  // namespace nocg
