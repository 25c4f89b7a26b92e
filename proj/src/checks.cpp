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

#include <cmath>
#include <sstream>

#include "nocg/harness.hpp"

namespace nocg::harness {

namespace {

struct MeanWithError {
  Vec mean;
  Vec std_error;
};

// Per-coordinate sample mean and standard error of the score-function
// gradient estimator at x.
MeanWithError score_gradient_stats(const NonObliviousObjective& obj, const Vec& x, long m,
                                   const StreamSeq& seq) {
  const size_t d = x.size();
  Vec sum(d, 0.0), sumsq(d, 0.0);
  for (long i = 0; i < m; ++i) {
    RngStream rng = seq.at(static_cast<uint64_t>(i));
    const StochasticSample z = obj.sample(x, rng);
    for (size_t c = 0; c < d; ++c) {
      const double v = z.value * z.logp_grad[c] + z.grad[c];
      sum[c] += v;
      sumsq[c] += v * v;
    }
  }
  MeanWithError out;
  out.mean.resize(d);
  out.std_error.resize(d);
  for (size_t c = 0; c < d; ++c) {
    out.mean[c] = sum[c] / static_cast<double>(m);
    const double var =
        std::max(0.0, (sumsq[c] - sum[c] * sum[c] / static_cast<double>(m)) /
                          static_cast<double>(m - 1));
    out.std_error[c] = std::sqrt(var / static_cast<double>(m));
  }
  return out;
}

bool within_5se(double value, double target, double se, std::string& detail) {
  const double band = 5.0 * std::max(se, 1e-300);
  if (std::abs(value - target) <= band) return true;
  std::ostringstream os;
  os << "got " << value << ", want " << target << " +- " << band;
  detail = os.str();
  return false;
}

CheckResult check_gaussian_anchor_unbiased(uint64_t seed) {
  CheckResult r{"estimators/gaussian_anchor_unbiased", true, ""};
  auto obj = make_gaussian_family(3, 1.0, GaussianPayoff::neg_half_sq_norm());
  const Vec x = {0.4, -0.2, 0.9};
  const Vec truth = obj->exact_grad(x);
  const MeanWithError stats =
      score_gradient_stats(*obj, x, 20000, StreamSeq{seed, phase::kCheck, 1});
  for (size_t c = 0; c < x.size(); ++c) {
    std::string detail;
    if (!within_5se(stats.mean[c], truth[c], stats.std_error[c], detail)) {
      r.pass = false;
      r.detail = "coord " + std::to_string(c) + ": " + detail;
      return r;
    }
  }
  return r;
}

CheckResult check_hessian_estimate_mean(uint64_t seed) {
  CheckResult r{"estimators/hessian_estimate_mean", true, ""};
  auto obj = make_gaussian_family(1, 1.0, GaussianPayoff::neg_half_sq_norm());
  const Vec y = {1.0};
  const long m = 50000;
  double sum = 0.0, sumsq = 0.0;
  const StreamSeq seq{seed, phase::kCheck, 2};
  for (long i = 0; i < m; ++i) {
    RngStream rng = seq.at(static_cast<uint64_t>(i));
    const StochasticSample z = obj->sample(y, rng);
    const double h = hessian_estimate(*obj, y, z)(0, 0);
    sum += h;
    sumsq += h * h;
  }
  const double mean = sum / m;
  const double se =
      std::sqrt(std::max(0.0, (sumsq - sum * sum / m) / static_cast<double>(m - 1)) / m);
  std::string detail;
  if (!within_5se(mean, -1.0, se, detail)) {
    r.pass = false;
    r.detail = detail;
  }
  return r;
}

CheckResult check_delta_exact_unbiased(uint64_t seed) {
  CheckResult r{"estimators/delta_exact_unbiased", true, ""};
  auto obj = make_gaussian_family(2, 1.0, GaussianPayoff::neg_half_sq_norm());
  const Vec x_prev = {0.0, 0.0};
  const Vec x_cur = {1.0, 0.0};
  const Vec d_vec = sub(x_cur, x_prev);
  const long m = 20000;
  const auto batch = sample_path_batch(*obj, x_prev, x_cur, m, StreamSeq{seed, phase::kCheck, 3});
  // Accumulate per-sample actions for mean and error bars.
  Vec sum(2, 0.0), sumsq(2, 0.0);
  for (const PathSample& ps : batch) {
    const Vec v = hessian_estimate_vec(*obj, ps.x_of_a, ps.z, d_vec);
    for (size_t c = 0; c < 2; ++c) {
      sum[c] += v[c];
      sumsq[c] += v[c] * v[c];
    }
  }
  const Vec truth = sub(obj->exact_grad(x_cur), obj->exact_grad(x_prev));
  for (size_t c = 0; c < 2; ++c) {
    const double mean = sum[c] / m;
    const double se =
        std::sqrt(std::max(0.0, (sumsq[c] - sum[c] * sum[c] / m) / static_cast<double>(m - 1)) / m);
    std::string detail;
    if (!within_5se(mean, truth[c], se, detail)) {
      r.pass = false;
      r.detail = "coord " + std::to_string(c) + ": " + detail;
      return r;
    }
  }
  return r;
}

CheckResult check_xi_delta_limit(uint64_t seed) {
  CheckResult r{"estimators/xi_delta_matches_exact_on_quadratics", true, ""};
  auto obj = make_gaussian_family(3, 0.7, GaussianPayoff::neg_half_sq_norm());
  const Vec x_prev = {0.1, 0.2, 0.3};
  const Vec x_cur = {0.4, 0.1, 0.5};
  const Vec d_vec = sub(x_cur, x_prev);
  const auto batch = sample_path_batch(*obj, x_prev, x_cur, 64, StreamSeq{seed, phase::kCheck, 4});
  const Vec exact = delta_exact(*obj, batch, d_vec);
  for (double delta : {1e-2, 1e-5}) {
    const Vec approx = xi_delta(*obj, batch, d_vec, delta);
    if (nrm2(sub(approx, exact)) > 1e-9) {
      r.pass = false;
      r.detail = "finite differences not exact on a quadratic log-density";
      return r;
    }
  }
  return r;
}

CheckResult check_telescoping(uint64_t) {
  CheckResult r{"estimators/telescoping_bitwise", true, ""};
  GradientEstimate est;
  est.g = {0.125, -3.5};
  const Vec g0 = est.g;
  std::vector<Vec> deltas = {{0.1, 0.2}, {-0.7, 0.03}, {1e-3, -2.5}, {0.33, 0.44}};
  for (const Vec& d : deltas) est = update_gradient_estimate(est, d);
  Vec replay = g0;
  for (const Vec& d : deltas) axpy(1.0, d, replay);
  if (replay != est.g) {
    r.pass = false;
    r.detail = "replayed sum differs bitwise";
  }
  return r;
}

CheckResult check_coverage_closed_forms(uint64_t) {
  CheckResult r{"submodular/coverage_closed_forms", true, ""};
  // Two elements, each covering one half of a weight-1 universe pair plus a
  // shared item: f(empty)=0, f({0})=f({1})=f({0,1})=1.
  StochasticSetFunction f = make_weighted_coverage(2, {1.0}, {1ULL, 1ULL});
  const Vec x = {0.5, 0.5};
  if (std::abs(multilinear_value_exact(f, x) - 0.75) > 1e-12) {
    r.pass = false;
    r.detail = "F(0.5,0.5) != 0.75";
    return r;
  }
  if (std::abs(multilinear_grad_exact(f, x, 0) - 0.5) > 1e-12 ||
      std::abs(multilinear_hessian_entry_exact(f, x, 0, 1) + 1.0) > 1e-12 ||
      multilinear_hessian_entry_exact(f, x, 1, 1) != 0.0) {
    r.pass = false;
    r.detail = "pinned derivative mismatch";
  }
  return r;
}

CheckResult check_multilinear_estimators(uint64_t seed) {
  CheckResult r{"submodular/estimator_unbiasedness", true, ""};
  StochasticSetFunction f = make_weighted_coverage(2, {1.0}, {1ULL, 1ULL});
  const Vec x = {0.5, 0.5};
  const long m = 20000;
  const Vec g = multilinear_anchor_gradient(f, x, m, StreamSeq{seed, phase::kCheck, 5});
  // Bernoulli differences live in [-1, 1]; 5 sigma with sigma <= 0.5/sqrt(m).
  const double band = 5.0 * 0.5 / std::sqrt(static_cast<double>(m));
  const Vec truth = multilinear_grad_exact(f, x);
  for (size_t c = 0; c < 2; ++c) {
    if (std::abs(g[c] - truth[c]) > band) {
      r.pass = false;
      r.detail = "anchor gradient outside the 5-sigma band";
      return r;
    }
  }
  const Vec delta =
      multilinear_delta_estimate(f, {0.0, 0.0}, {0.5, 0.0}, m, StreamSeq{seed, phase::kCheck, 6});
  const Vec dtruth = sub(multilinear_grad_exact(f, {0.5, 0.0}), multilinear_grad_exact(f, {0.0, 0.0}));
  for (size_t c = 0; c < 2; ++c) {
    if (std::abs(delta[c] - dtruth[c]) > 5.0 * 1.0 / std::sqrt(static_cast<double>(m))) {
      r.pass = false;
      r.detail = "delta estimate outside the 5-sigma band";
      return r;
    }
  }
  return r;
}

CheckResult check_pipage(uint64_t seed) {
  CheckResult r{"submodular/pipage_never_decreases", true, ""};
  StochasticSetFunction f = make_weighted_coverage(
      4, {1.0, 0.8, 0.6, 0.4, 0.5}, {0b00011ULL, 0b00110ULL, 0b01100ULL, 0b11000ULL});
  const MatroidConstraint constraint = MatroidConstraint::cardinality(4, 2);
  RngStream rng = derive_stream(seed, phase::kCheck, 7, 0);
  for (int trial = 0; trial < 25; ++trial) {
    Vec x(4);
    double total = 0.0;
    for (double& xi : x) {
      xi = rng.uniform01();
      total += xi;
    }
    if (total > 2.0)
      for (double& xi : x) xi *= 2.0 / total;
    const double before = multilinear_value_exact(f, x);
    const SetMask s = round_to_set(x, constraint, f, RoundingMode::Pipage, rng);
    if (!constraint.feasible(s) || f.expected_eval(s) < before - 1e-9) {
      r.pass = false;
      r.detail = "pipage output infeasible or value decreased";
      return r;
    }
  }
  return r;
}

CheckResult check_cross_partials(uint64_t) {
  CheckResult r{"submodular/cross_partials_nonpositive", true, ""};
  StochasticSetFunction f = make_facility_location(
      3, {{{0.9, 0.1, 0.4}, {0.2, 0.8, 0.3}}, {{0.5, 0.6, 0.2}, {0.3, 0.2, 0.9}}});
  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (double b : {0.0, 0.5, 1.0}) {
      const Vec x = {a, b, 1.0 - a};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const double h = multilinear_hessian_entry_exact(f, x, i, j);
          if (i == j && h != 0.0) {
            r.pass = false;
            r.detail = "nonzero diagonal";
            return r;
          }
          if (i != j && h > 1e-9) {
            r.pass = false;
            r.detail = "positive cross partial";
            return r;
          }
        }
      }
    }
  }
  return r;
}

CheckResult check_brute_force(uint64_t) {
  CheckResult r{"submodular/brute_force_fixtures", true, ""};
  StochasticSetFunction cov = make_weighted_coverage(2, {1.0}, {1ULL, 1ULL});
  const BruteForceResult opt = brute_force_opt(cov, MatroidConstraint::cardinality(2, 1));
  if (opt.best_set != 0b01ULL || std::abs(opt.value - 1.0) > 1e-12) {
    r.pass = false;
    r.detail = "coverage k=1 fixture";
    return r;
  }
  StochasticSetFunction mod = make_modular({1.0, 1.0, 1.0});
  const BruteForceResult mopt = brute_force_opt(mod, MatroidConstraint::cardinality(3, 2));
  if (std::abs(mopt.value - 2.0) > 1e-12) {
    r.pass = false;
    r.detail = "modular k=2 fixture";
  }
  return r;
}

CheckResult check_scg_exact(uint64_t seed) {
  CheckResult r{"solvers/scg_exact_coverage", true, ""};
  StochasticSetFunction f = make_weighted_coverage(2, {1.0}, {1ULL, 1ULL});
  auto obj = as_non_oblivious(f);
  auto engine = make_exact_engine(*obj);
  SolverSchedule s;
  s.kind = SolverKind::ScgPP;
  s.iterations = 1;
  s.anchor_rule = AnchorRule::Initial;
  s.step_rule = SolverSchedule::StepRule::OneOverT;
  SolverOptions options;
  options.reporting.exact_value = [&](const Vec& x) { return multilinear_value_exact(f, x); };
  options.reporting.exact_grad = [&](const Vec& x) { return multilinear_grad_exact(f, x); };
  const RunTrace trace = scg_pp(*engine, FeasibleRegion::cardinality(2, 1), s, seed, options);
  if (std::abs(trace.final_f() - 1.0) > 1e-12 || trace.output != Vec{1.0, 0.0}) {
    r.pass = false;
    r.detail = "single exact step did not land on the tie-broken vertex";
  }
  return r;
}

CheckResult check_oracle_accounting(uint64_t seed) {
  CheckResult r{"solvers/oracle_accounting", true, ""};
  auto obj = make_gaussian_family(3, 1.0, GaussianPayoff::neg_half_sq_norm());
  auto engine = make_score_engine(*obj, HvpMethod::exact());
  SmoothnessProfile profile{1.0, 1.0, 1.0, 0.0, std::sqrt(3.0)};
  SolverSchedule s = schedule_from_epsilon(SolverKind::ScgPP, profile, 0.2);
  const RunTrace trace =
      scg_pp(*engine, FeasibleRegion::cardinality(3, 1), s, seed, SolverOptions{});
  long expected = 0;
  for (int t = 0; t < s.iterations; ++t)
    expected += s.is_anchor(t) ? s.anchor_batch(t) : s.path_batch(t);
  if (trace.total_oracle_calls() != expected) {
    r.pass = false;
    r.detail = "trace counter does not match the scheduled totals";
  }
  return r;
}

CheckResult check_convex_bound(uint64_t seed) {
  CheckResult r{"solvers/convex_theorem_bound", true, ""};
  Mat A(2, 2);
  A(0, 0) = A(1, 1) = 2.0;  // F(x) = -|x - c|^2 up to a constant
  const Vec c = {0.5, 0.5};
  auto obj = make_deterministic_quadratic(A, {1.0, 1.0}, 0.0);
  auto engine = make_exact_engine(*obj);
  const FeasibleRegion region = FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0});
  SmoothnessProfile profile{0.6, 1.5, 2.0, 0.0, region.diameter()};
  SolverSchedule s = schedule_from_epsilon(SolverKind::SfwConvex, profile, 0.05);
  s.iterations = 64;
  SolverOptions options;
  std::shared_ptr<NonObliviousObjective> shared = std::move(obj);
  options.reporting.exact_value = [shared](const Vec& x) { return shared->exact_value(x); };
  options.reporting.exact_grad = [shared](const Vec& x) { return shared->exact_grad(x); };
  const RunTrace trace = sfw_convex(*engine, region, s, seed, options);
  const double f_star = shared->exact_value(c);
  const double lb = lbar(profile);
  const double gap0 = f_star - trace.rows.front().f_value;
  for (const TraceRow& row : trace.rows) {
    const double bound = (28.0 * lb * profile.D * profile.D + gap0) / (row.t + 2.0);
    if (f_star - row.f_value > bound + 1e-9) {
      r.pass = false;
      r.detail = "suboptimality exceeded the theorem bound at t=" + std::to_string(row.t);
      return r;
    }
  }
  return r;
}

CheckResult check_determinism(uint64_t seed) {
  CheckResult r{"solvers/deterministic_replay", true, ""};
  auto obj = make_gaussian_family(2, 1.0, GaussianPayoff::neg_half_sq_norm());
  auto engine = make_score_engine(*obj, HvpMethod::exact());
  SmoothnessProfile profile{1.0, 1.0, 1.0, 0.0, std::sqrt(2.0)};
  SolverSchedule s = schedule_from_epsilon(SolverKind::SfwConvex, profile, 0.1);
  s.iterations = 12;
  const FeasibleRegion region = FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0});
  const RunTrace a = sfw_convex(*engine, region, s, seed, SolverOptions{});
  const RunTrace b = sfw_convex(*engine, region, s, seed, SolverOptions{});
  if (a.output != b.output || a.rows.size() != b.rows.size()) {
    r.pass = false;
    r.detail = "replay diverged";
    return r;
  }
  for (size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].f_value != b.rows[i].f_value || a.rows[i].fw_gap != b.rows[i].fw_gap) {
      r.pass = false;
      r.detail = "replay diverged at row " + std::to_string(i);
      return r;
    }
  }
  return r;
}

CheckResult check_smcg_caps(uint64_t seed) {
  CheckResult r{"solvers/smcg_coordinate_caps", true, ""};
  StochasticSetFunction f = make_directed_cut(
      4, {{0, 1, 1.0}, {1, 2, 0.8}, {2, 3, 0.6}, {3, 0, 0.4}, {0, 2, 0.5}});
  auto obj = as_non_oblivious(f);
  auto engine = make_exact_engine(*obj);
  SolverSchedule s;
  s.kind = SolverKind::SmcgPP;
  s.iterations = 20;
  s.anchor_rule = AnchorRule::Initial;
  s.step_rule = SolverSchedule::StepRule::OneOverT;
  const FeasibleRegion region = FeasibleRegion::cardinality(4, 2);
  const Vec ubar = region.upper_bounds();
  bool ok = true;
  SolverOptions options;
  options.observer = [&](int, const Vec& x, const Vec&) {
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i] > ubar[i] + 1e-12) ok = false;
  };
  const RunTrace trace = smcg_pp(*engine, region, ubar, s, seed, options);
  for (size_t i = 0; i < trace.output.size(); ++i)
    if (trace.output[i] > ubar[i] + 1e-12) ok = false;
  if (!ok) {
    r.pass = false;
    r.detail = "trajectory exceeded ubar";
  }
  return r;
}

}  // namespace

std::vector<CheckResult> check_estimators(uint64_t seed) {
  return {check_gaussian_anchor_unbiased(seed), check_hessian_estimate_mean(seed),
          check_delta_exact_unbiased(seed), check_xi_delta_limit(seed), check_telescoping(seed)};
}

std::vector<CheckResult> check_submodular(uint64_t seed) {
  return {check_coverage_closed_forms(seed), check_multilinear_estimators(seed),
          check_pipage(seed), check_cross_partials(seed), check_brute_force(seed)};
}

std::vector<CheckResult> check_solvers(uint64_t seed) {
  return {check_scg_exact(seed), check_oracle_accounting(seed), check_convex_bound(seed),
          check_determinism(seed), check_smcg_caps(seed)};
}

std::vector<CheckResult> check_suite(const std::string& suite, uint64_t seed) {
  if (suite == "estimators") return check_estimators(seed);
  if (suite == "submodular") return check_submodular(seed);
  if (suite == "solvers") return check_solvers(seed);
  if (suite == "all") {
    std::vector<CheckResult> all = check_estimators(seed);
    for (auto& c : check_submodular(seed)) all.push_back(std::move(c));
    for (auto& c : check_solvers(seed)) all.push_back(std::move(c));
    return all;
  }
  throw ConfigError("unknown check suite: " + suite + " (expected estimators|submodular|solvers|all)");
}

}  // namespace nocg::harness
