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

#include "nocg/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nocg/errors.hpp"

namespace nocg {

namespace {

long ceil_to_long(double v) {
  const double c = std::ceil(v);
  if (c < 1.0) return 1;
  if (c > 9.0e18) throw std::invalid_argument("batch size overflows");
  return static_cast<long>(c);
}

}  // namespace

bool SolverSchedule::is_anchor(int t) const {
  if (t == 0) return true;
  switch (anchor_rule) {
    case AnchorRule::EveryQ:
      return q >= 1 && t % q == 0;
    case AnchorRule::PowersOfTwo:
      return (t & (t - 1)) == 0;
    case AnchorRule::Initial:
      return false;
  }
  return false;
}

long SolverSchedule::anchor_batch(int t) const {
  long m = anchor_batch_const;
  if (anchor_batch_quad_coeff > 0.0) {
    const double tt = static_cast<double>(t + 1);
    m = std::max(m, ceil_to_long(anchor_batch_quad_coeff * tt * tt));
  }
  return std::min(std::max(m, 1L), batch_cap);
}

bool SolverSchedule::anchor_batch_capped(int t) const {
  long m = anchor_batch_const;
  if (anchor_batch_quad_coeff > 0.0) {
    const double tt = static_cast<double>(t + 1);
    m = std::max(m, ceil_to_long(anchor_batch_quad_coeff * tt * tt));
  }
  return m > batch_cap;
}

long SolverSchedule::path_batch(int t) const {
  long m = path_batch_const;
  if (path_batch_lin_coeff > 0.0)
    m = std::max(m, ceil_to_long(path_batch_lin_coeff * static_cast<double>(t + 2)));
  return std::min(std::max(m, 1L), batch_cap);
}

bool SolverSchedule::path_batch_capped(int t) const {
  long m = path_batch_const;
  if (path_batch_lin_coeff > 0.0)
    m = std::max(m, ceil_to_long(path_batch_lin_coeff * static_cast<double>(t + 2)));
  return m > batch_cap;
}

double SolverSchedule::eta(int t) const {
  switch (step_rule) {
    case StepRule::Constant:
      return eta_const;
    case StepRule::HarmonicTwo:
      return 2.0 / static_cast<double>(t + 2);
    case StepRule::OneOverT:
      return 1.0 / static_cast<double>(std::max(1, iterations));
  }
  return 0.0;
}

SolverSchedule schedule_from_epsilon(SolverKind kind, const SmoothnessProfile& profile,
                                     double epsilon, long batch_cap) {
  profile.validate();
  return schedule_from_constants(kind, profile.G, lbar(profile), profile.D, epsilon, batch_cap);
}

SolverSchedule schedule_from_constants(SolverKind kind, double G, double lbar_value, double D,
                                       double epsilon, long batch_cap) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("schedule: epsilon must lie in (0, 1)");
  if (batch_cap < 1) throw std::invalid_argument("schedule: batch_cap >= 1");
  if (!(G > 0.0) || !(lbar_value > 0.0) || !(D > 0.0))
    throw std::invalid_argument("schedule: G, lbar, D must be positive");
  const double lb = lbar_value;

  SolverSchedule s;
  s.kind = kind;
  s.epsilon = epsilon;
  s.batch_cap = batch_cap;
  switch (kind) {
    case SolverKind::SfwNonconvex:
      s.anchor_rule = AnchorRule::EveryQ;
      s.q = static_cast<int>(ceil_to_long(G / (16.0 * epsilon)));
      s.anchor_batch_const = ceil_to_long(G * G / (8.0 * epsilon * epsilon));
      s.path_batch_const = ceil_to_long(2.0 * G / epsilon);
      s.step_rule = SolverSchedule::StepRule::Constant;
      s.eta_const = epsilon / (lb * D);
      s.iterations = static_cast<int>(
          std::min<long>(ceil_to_long(1.0 / (epsilon * epsilon)), 1000000L));
      break;
    case SolverKind::SfwConvex:
      s.anchor_rule = AnchorRule::PowersOfTwo;
      s.anchor_batch_const = 1;
      s.anchor_batch_quad_coeff = G * G / (lb * lb * D * D);
      s.path_batch_const = 1;
      s.path_batch_lin_coeff = 16.0;
      s.step_rule = SolverSchedule::StepRule::HarmonicTwo;
      s.iterations = static_cast<int>(ceil_to_long(1.0 / epsilon));
      break;
    case SolverKind::ScgPP:
    case SolverKind::SmcgPP:
      s.anchor_rule = AnchorRule::Initial;
      s.anchor_batch_const = ceil_to_long(G * G / (2.0 * lb * lb * D * D * epsilon * epsilon));
      s.path_batch_const = ceil_to_long(1.0 / (2.0 * epsilon));
      s.step_rule = SolverSchedule::StepRule::OneOverT;
      s.iterations = static_cast<int>(ceil_to_long(1.0 / epsilon));
      break;
  }
  return s;
}

SolverSchedule multilinear_schedule(double epsilon, int rank, int dim, double marginal_bound,
                                    double multiplier, long batch_cap) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("multilinear_schedule: epsilon must lie in (0, 1)");
  if (rank < 1 || dim < 1) throw std::invalid_argument("multilinear_schedule: bad rank/dim");
  if (!(marginal_bound > 0.0) || !(multiplier > 0.0))
    throw std::invalid_argument("multilinear_schedule: D_f and multiplier must be positive");
  SolverSchedule s;
  s.kind = SolverKind::ScgPP;
  s.epsilon = epsilon;
  s.batch_cap = batch_cap;
  s.anchor_rule = AnchorRule::Initial;
  const double r = static_cast<double>(rank);
  const double d = static_cast<double>(dim);
  s.anchor_batch_const =
      ceil_to_long(multiplier * std::sqrt(d) * marginal_bound / (std::sqrt(r) * epsilon * epsilon));
  s.path_batch_const = ceil_to_long(multiplier * std::sqrt(r * r * r * d) * marginal_bound / epsilon);
  s.step_rule = SolverSchedule::StepRule::OneOverT;
  s.iterations = static_cast<int>(ceil_to_long(1.0 / epsilon));
  return s;
}

double default_hvp_delta(const SmoothnessProfile& profile, double epsilon, int T) {
  profile.validate();
  const double lb = lbar(profile);
  return lb * epsilon * epsilon /
         (16.0 * profile.D * profile.L2 * std::sqrt(1.0 + epsilon * static_cast<double>(T)) + 1.0);
}

void check_delta_smallness(const SmoothnessProfile& profile, double epsilon, int T,
                           long path_batch_min, double delta) {
  profile.validate();
  if (!(delta > 0.0)) throw std::invalid_argument("check_delta_smallness: delta must be positive");
  const double lb = lbar(profile);
  const double D = profile.D;
  const double L2 = profile.L2;
  const double horizon = std::sqrt(1.0 + epsilon * static_cast<double>(std::max(0, T - 1)));
  const double lhs =
      4.0 * delta *
      (D * D * D * L2 * lb * epsilon / std::sqrt(static_cast<double>(std::max(1L, path_batch_min))) +
       D * D * L2 * horizon * lb * D * epsilon + D * D * D * D * L2 * L2 * delta);
  const double rhs = lb * lb * D * D * epsilon * epsilon * epsilon / 2.0;
  if (lhs > rhs) {
    std::ostringstream os;
    os << "finite-difference step too large for the variance budget: " << lhs << " > " << rhs
       << " (delta=" << delta << ", epsilon=" << epsilon << ", T=" << T << ")";
    throw std::invalid_argument(os.str());
  }
}

double fw_gap(const Vec& grad, const FeasibleRegion& region, const Vec& x) {
  const Vec v = region.lmo(grad);
  return dot(grad, v) - dot(grad, x);
}

double RunTrace::min_fw_gap() const {
  double best = std::numeric_limits<double>::infinity();
  for (const TraceRow& r : rows) best = std::min(best, r.fw_gap);
  return best;
}

namespace {

class ScoreEngine final : public GradientEngine {
 public:
  ScoreEngine(const NonObliviousObjective& obj, HvpMethod hvp) : obj_(obj), hvp_(hvp) {
    if (hvp.kind == HvpMethod::Kind::ExactSecondOrder && !obj.has_second_order())
      throw UnsupportedOperation(
          "score engine: exact Hessian actions requested but the objective has none");
  }

  int dim() const override { return obj_.dim(); }

  Batch anchor(const Vec& x, long m, const StreamSeq& seq) const override {
    GradientEstimate est = anchor_gradient(obj_, x, m, seq);
    return Batch{std::move(est.g), m};
  }

  Batch path_delta(const Vec& x_prev, const Vec& x_cur, long m,
                   const StreamSeq& seq) const override {
    const std::vector<PathSample> batch = sample_path_batch(obj_, x_prev, x_cur, m, seq);
    const Vec d_vec = sub(x_cur, x_prev);
    Vec delta = hvp_.kind == HvpMethod::Kind::ExactSecondOrder
                    ? delta_exact(obj_, batch, d_vec)
                    : xi_delta(obj_, batch, d_vec, hvp_.delta);
    return Batch{std::move(delta), m};
  }

  Batch value_estimate(const Vec& x, long m, const StreamSeq& seq) const override {
    const McValue v = mc_value(obj_, x, m, seq);
    Batch b;
    b.value = Vec{v.mean};
    b.calls = m;
    return b;
  }

 private:
  const NonObliviousObjective& obj_;
  HvpMethod hvp_;
};

class ExactEngine final : public GradientEngine {
 public:
  explicit ExactEngine(const NonObliviousObjective& obj) : obj_(obj) {
    if (!obj.has_exact())
      throw UnsupportedOperation("exact engine: objective carries no exact oracles");
  }

  int dim() const override { return obj_.dim(); }

  Batch anchor(const Vec& x, long, const StreamSeq&) const override {
    return Batch{obj_.exact_grad(x), 1};
  }

  Batch path_delta(const Vec& x_prev, const Vec& x_cur, long, const StreamSeq&) const override {
    return Batch{sub(obj_.exact_grad(x_cur), obj_.exact_grad(x_prev)), 2};
  }

  Batch value_estimate(const Vec& x, long, const StreamSeq&) const override {
    Batch b;
    b.value = Vec{obj_.exact_value(x)};
    b.calls = 1;
    return b;
  }

 private:
  const NonObliviousObjective& obj_;
};

class MultilinearEngine final : public GradientEngine {
 public:
  explicit MultilinearEngine(StochasticSetFunction f) : f_(std::move(f)) {}

  int dim() const override { return f_.ground_size; }

  Batch anchor(const Vec& x, long m, const StreamSeq& seq) const override {
    return Batch{multilinear_anchor_gradient(f_, x, m, seq), m};
  }

  Batch path_delta(const Vec& x_prev, const Vec& x_cur, long m,
                   const StreamSeq& seq) const override {
    return Batch{multilinear_delta_estimate(f_, x_prev, x_cur, m, seq), m};
  }

  Batch value_estimate(const Vec& x, long m, const StreamSeq& seq) const override {
    double sum = 0.0;
    for (long i = 0; i < m; ++i) {
      RngStream rng = seq.at(static_cast<uint64_t>(i));
      const SetFunctionSample gamma = f_.sampler(rng);
      SetMask s = 0;
      for (size_t c = 0; c < x.size(); ++c)
        if (rng.uniform01() < x[c]) s |= (1ULL << c);
      sum += gamma.eval(s);
    }
    Batch b;
    b.value = Vec{sum / static_cast<double>(m)};
    b.calls = m;
    return b;
  }

 private:
  StochasticSetFunction f_;
};

enum class UpdateRule { FrankWolfe, Increment };

struct LoopPolicy {
  UpdateRule update = UpdateRule::FrankWolfe;
  bool shrunk = false;          // per-iteration LMO over {v <= ubar - x}
  bool keep_iterates = false;   // needed for the uniformly sampled output
  bool assert_final_feasible = false;
};

// Shared iteration skeleton: anchor-or-telescope the gradient estimate, one
// LMO call, move, record. Report columns never consume solver samples.
RunTrace run_loop(const GradientEngine& engine, const FeasibleRegion& region,
                  const SolverSchedule& schedule, uint64_t master_seed,
                  const SolverOptions& options, const LoopPolicy& policy, const Vec& ubar) {
  const int T = schedule.iterations;
  if (T < 1) throw std::invalid_argument("solver: need at least one iteration");
  const size_t d = static_cast<size_t>(engine.dim());
  if (static_cast<int>(d) != region.dim())
    throw std::invalid_argument("solver: engine/region dimension mismatch");

  Vec x;
  if (policy.update == UpdateRule::Increment) {
    // Continuous-greedy path starts at the origin even when 0 is infeasible.
    x = Vec(d, 0.0);
  } else if (options.x0) {
    x = *options.x0;
    check_dim(x, d, "solver x0");
  } else {
    x = region.lmo(Vec(d, 0.0));
  }

  RunTrace trace;
  trace.rows.reserve(static_cast<size_t>(T) + 1);
  std::vector<Vec> iterates;
  if (policy.keep_iterates) iterates.reserve(static_cast<size_t>(T) + 1);

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&t_start] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
        .count();
  };

  auto report_row = [&](int t, double eta, long ba, long bp, long calls, const Vec& at) {
    TraceRow row;
    row.t = t;
    row.eta = eta;
    row.batch_anchor = ba;
    row.batch_path = bp;
    row.oracle_calls = calls;
    if (options.reporting.exact_value) {
      row.f_value = options.reporting.exact_value(at);
      row.f_is_exact = true;
    } else {
      row.f_value = engine
                        .value_estimate(at, options.reporting.mc_value_samples,
                                        StreamSeq{master_seed, phase::kReport,
                                                  static_cast<uint64_t>(2 * t)})
                        .value[0];
      row.f_is_exact = false;
    }
    Vec grad;
    if (options.reporting.exact_grad) {
      grad = options.reporting.exact_grad(at);
      row.gap_is_exact = true;
    } else {
      grad = engine
                 .anchor(at, options.reporting.mc_grad_samples,
                         StreamSeq{master_seed, phase::kReport, static_cast<uint64_t>(2 * t + 1)})
                 .value;
      row.gap_is_exact = false;
    }
    row.fw_gap = fw_gap(grad, region, at);
    row.wallclock_ms = options.reporting.record_wallclock ? elapsed_ms() : 0.0;
    trace.rows.push_back(std::move(row));
  };

  long calls = 0;
  Vec g(d, 0.0);
  Vec x_prev(d, 0.0);

  for (int t = 0; t < T; ++t) {
    long batch_anchor = 0;
    long batch_path = 0;
    if (schedule.is_anchor(t)) {
      const long m = schedule.anchor_batch(t);
      if (schedule.anchor_batch_capped(t)) trace.batch_cap_hit = true;
      GradientEngine::Batch res =
          engine.anchor(x, m, StreamSeq{master_seed, phase::kAnchor, static_cast<uint64_t>(t)});
      g = std::move(res.value);
      calls += res.calls;
      batch_anchor = res.calls;
    } else {
      const long m = schedule.path_batch(t);
      if (schedule.path_batch_capped(t)) trace.batch_cap_hit = true;
      GradientEngine::Batch res = engine.path_delta(
          x_prev, x, m, StreamSeq{master_seed, phase::kPath, static_cast<uint64_t>(t)});
      axpy(1.0, res.value, g);
      calls += res.calls;
      batch_path = res.calls;
    }

    if (options.observer) options.observer(t, x, g);
    report_row(t, schedule.eta(t), batch_anchor, batch_path, calls, x);

    Vec v;
    if (policy.shrunk) {
      v = region.shrink(x, ubar).lmo(g);
    } else {
      v = region.lmo(g);
    }

    x_prev = x;
    if (policy.update == UpdateRule::Increment) {
      axpy(1.0 / static_cast<double>(T), v, x);
    } else {
      const double eta = schedule.eta(t);
      for (size_t i = 0; i < d; ++i) x[i] += eta * (v[i] - x[i]);
    }

    if (policy.shrunk) {
      for (size_t i = 0; i < d; ++i)
        if (x[i] > ubar[i] + 1e-9)
          throw InvariantViolation("measured greedy: iterate exceeded the coordinate cap");
    }
    if (policy.keep_iterates) iterates.push_back(x);
  }

  report_row(T, 0.0, 0, 0, calls, x);

  if (policy.assert_final_feasible && !region.contains(x, 1e-9))
    throw InvariantViolation("continuous greedy: final iterate infeasible");

  if (policy.keep_iterates) {
    // Uniform draw over the visited iterates x^1..x^T, taken from the master
    // seed after the run so replays reproduce the same selection.
    RngStream pick = derive_stream(master_seed, phase::kOutputSelect, 0, 0);
    int idx = 1 + static_cast<int>(pick.uniform01() * static_cast<double>(T));
    idx = std::min(idx, T);
    trace.output = iterates[static_cast<size_t>(idx - 1)];
    trace.output_iter = idx;
  } else {
    trace.output = x;
    trace.output_iter = T;
  }
  if (trace.batch_cap_hit)
    trace.warnings.push_back("batch cap truncated at least one scheduled batch");
  return trace;
}

void require_kind(const SolverSchedule& schedule, SolverKind kind, const char* name) {
  if (schedule.kind != kind)
    throw std::invalid_argument(std::string(name) + ": schedule kind mismatch");
}

}  // namespace

RunTrace sfw_nonconvex(const GradientEngine& engine, const FeasibleRegion& region,
                       const SolverSchedule& schedule, uint64_t master_seed,
                       const SolverOptions& options) {
  require_kind(schedule, SolverKind::SfwNonconvex, "sfw_nonconvex");
  LoopPolicy policy;
  policy.update = UpdateRule::FrankWolfe;
  policy.keep_iterates = true;
  return run_loop(engine, region, schedule, master_seed, options, policy, Vec());
}

RunTrace sfw_convex(const GradientEngine& engine, const FeasibleRegion& region,
                    const SolverSchedule& schedule, uint64_t master_seed,
                    const SolverOptions& options) {
  require_kind(schedule, SolverKind::SfwConvex, "sfw_convex");
  LoopPolicy policy;
  policy.update = UpdateRule::FrankWolfe;
  return run_loop(engine, region, schedule, master_seed, options, policy, Vec());
}

RunTrace scg_pp(const GradientEngine& engine, const FeasibleRegion& region,
                const SolverSchedule& schedule, uint64_t master_seed,
                const SolverOptions& options) {
  require_kind(schedule, SolverKind::ScgPP, "scg_pp");
  LoopPolicy policy;
  policy.update = UpdateRule::Increment;
  policy.assert_final_feasible = true;
  return run_loop(engine, region, schedule, master_seed, options, policy, Vec());
}

RunTrace smcg_pp(const GradientEngine& engine, const FeasibleRegion& region, const Vec& ubar,
                 const SolverSchedule& schedule, uint64_t master_seed,
                 const SolverOptions& options) {
  require_kind(schedule, SolverKind::SmcgPP, "smcg_pp");
  if (!region.down_closed())
    throw std::invalid_argument("smcg_pp: region must be down-closed");
  check_dim(ubar, static_cast<size_t>(region.dim()), "smcg_pp ubar");
  LoopPolicy policy;
  policy.update = UpdateRule::Increment;
  policy.shrunk = true;
  policy.assert_final_feasible = true;
  return run_loop(engine, region, schedule, master_seed, options, policy, ubar);
}

std::unique_ptr<GradientEngine> make_score_engine(const NonObliviousObjective& obj,
                                                  HvpMethod hvp) {
  return std::make_unique<ScoreEngine>(obj, hvp);
}

std::unique_ptr<GradientEngine> make_exact_engine(const NonObliviousObjective& obj) {
  return std::make_unique<ExactEngine>(obj);
}

std::unique_ptr<GradientEngine> make_multilinear_engine(const StochasticSetFunction& f) {
  return std::make_unique<MultilinearEngine>(f);
}

RunTrace baseline_scg_momentum(const GradientEngine& engine, const FeasibleRegion& region, int T,
                               const std::function<double(int)>& rho_schedule, long batch_per_iter,
                               uint64_t master_seed, const SolverOptions& options) {
  if (T < 1) throw std::invalid_argument("baseline_scg_momentum: need at least one iteration");
  // Continuous-greedy skeleton with the momentum blend g <- (1-rho) g + rho * fresh.
  const size_t d = static_cast<size_t>(engine.dim());
  Vec x(d, 0.0);
  Vec g(d, 0.0);
  RunTrace trace;
  long calls = 0;
  auto report = [&](int t, long batch, const Vec& at) {
    TraceRow row;
    row.t = t;
    row.eta = 1.0 / static_cast<double>(T);
    row.batch_anchor = batch;
    row.oracle_calls = calls;
    if (options.reporting.exact_value) {
      row.f_value = options.reporting.exact_value(at);
      row.f_is_exact = true;
    } else {
      row.f_value = engine
                        .value_estimate(at, options.reporting.mc_value_samples,
                                        StreamSeq{master_seed, phase::kReport,
                                                  static_cast<uint64_t>(2 * t)})
                        .value[0];
    }
    Vec grad = options.reporting.exact_grad
                   ? options.reporting.exact_grad(at)
                   : engine
                         .anchor(at, options.reporting.mc_grad_samples,
                                 StreamSeq{master_seed, phase::kReport,
                                           static_cast<uint64_t>(2 * t + 1)})
                         .value;
    row.gap_is_exact = static_cast<bool>(options.reporting.exact_grad);
    row.fw_gap = fw_gap(grad, region, at);
    trace.rows.push_back(std::move(row));
  };

  for (int t = 0; t < T; ++t) {
    GradientEngine::Batch fresh = engine.anchor(
        x, batch_per_iter, StreamSeq{master_seed, phase::kAnchor, static_cast<uint64_t>(t)});
    calls += fresh.calls;
    double rho = rho_schedule(t);
    rho = std::clamp(rho, 0.0, 1.0);
    for (size_t i = 0; i < d; ++i) g[i] = (1.0 - rho) * g[i] + rho * fresh.value[i];
    if (options.observer) options.observer(t, x, g);
    report(t, fresh.calls, x);
    const Vec v = region.lmo(g);
    axpy(1.0 / static_cast<double>(T), v, x);
  }
  report(T, 0, x);
  if (!region.contains(x, 1e-9))
    throw InvariantViolation("momentum greedy: final iterate infeasible");
  trace.output = x;
  trace.output_iter = T;
  return trace;
}

RunTrace baseline_sfw_vanilla(const GradientEngine& engine, const FeasibleRegion& region, int T,
                              const std::function<long(int)>& batch_growth, uint64_t master_seed,
                              const SolverOptions& options) {
  if (T < 1) throw std::invalid_argument("baseline_sfw_vanilla: need at least one iteration");
  const size_t d = static_cast<size_t>(engine.dim());
  Vec x = options.x0 ? *options.x0 : region.lmo(Vec(d, 0.0));
  RunTrace trace;
  long calls = 0;
  auto report = [&](int t, double eta, long batch, const Vec& at) {
    TraceRow row;
    row.t = t;
    row.eta = eta;
    row.batch_anchor = batch;
    row.oracle_calls = calls;
    if (options.reporting.exact_value) {
      row.f_value = options.reporting.exact_value(at);
      row.f_is_exact = true;
    } else {
      row.f_value = engine
                        .value_estimate(at, options.reporting.mc_value_samples,
                                        StreamSeq{master_seed, phase::kReport,
                                                  static_cast<uint64_t>(2 * t)})
                        .value[0];
    }
    Vec grad = options.reporting.exact_grad
                   ? options.reporting.exact_grad(at)
                   : engine
                         .anchor(at, options.reporting.mc_grad_samples,
                                 StreamSeq{master_seed, phase::kReport,
                                           static_cast<uint64_t>(2 * t + 1)})
                         .value;
    row.gap_is_exact = static_cast<bool>(options.reporting.exact_grad);
    row.fw_gap = fw_gap(grad, region, at);
    trace.rows.push_back(std::move(row));
  };
  for (int t = 0; t < T; ++t) {
    const long m = std::max(1L, batch_growth(t));
    GradientEngine::Batch res =
        engine.anchor(x, m, StreamSeq{master_seed, phase::kAnchor, static_cast<uint64_t>(t)});
    calls += res.calls;
    if (options.observer) options.observer(t, x, res.value);
    const double eta = 2.0 / static_cast<double>(t + 2);
    report(t, eta, res.calls, x);
    const Vec v = region.lmo(res.value);
    for (size_t i = 0; i < d; ++i) x[i] += eta * (v[i] - x[i]);
  }
  report(T, 0.0, 0, x);
  trace.output = x;
  trace.output_iter = T;
  return trace;
}

}  // namespace nocg
