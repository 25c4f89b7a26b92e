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

#ifndef NOCG_SOLVERS_HPP
#define NOCG_SOLVERS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nocg/estimators.hpp"
#include "nocg/lmo.hpp"
#include "nocg/problems.hpp"
#include "nocg/submodular.hpp"
#include "nocg/vec.hpp"

namespace nocg {

// Produces anchor gradient estimates and path-difference updates. Solvers are
// agnostic to whether the gradients come from the score-function machinery,
// the sparse set-function estimators, or exact oracles.
class GradientEngine {
 public:
  virtual ~GradientEngine() = default;

  struct Batch {
    Vec value;
    long calls = 0;  // stochastic-oracle draws consumed
  };

  virtual int dim() const = 0;
  virtual Batch anchor(const Vec& x, long m, const StreamSeq& seq) const = 0;
  virtual Batch path_delta(const Vec& x_prev, const Vec& x_cur, long m,
                           const StreamSeq& seq) const = 0;
  virtual Batch value_estimate(const Vec& x, long m, const StreamSeq& seq) const = 0;
};

// Score-function engine over a NonObliviousObjective, with the Hessian
// actions taken exactly or by finite differences.
std::unique_ptr<GradientEngine> make_score_engine(const NonObliviousObjective& obj,
                                                  HvpMethod hvp);

// Deterministic engine reading the family's exact oracles.
std::unique_ptr<GradientEngine> make_exact_engine(const NonObliviousObjective& obj);

// Sparse Hessian-entry engine for multilinear extensions; never touches
// exact oracles.
std::unique_ptr<GradientEngine> make_multilinear_engine(const StochasticSetFunction& f);

enum class SolverKind { SfwNonconvex, SfwConvex, ScgPP, SmcgPP };
enum class AnchorRule { EveryQ, PowersOfTwo, Initial };

struct SolverSchedule {
  SolverKind kind = SolverKind::ScgPP;
  double epsilon = 0.1;
  int iterations = 10;  // T

  AnchorRule anchor_rule = AnchorRule::Initial;
  int q = 1;  // EveryQ epoch length

  // Anchor batch: max(const, ceil(quad_coeff * (t+1)^2)), capped.
  long anchor_batch_const = 1;
  double anchor_batch_quad_coeff = 0.0;
  // Path batch: max(const, ceil(lin_coeff * (t+2))), capped.
  long path_batch_const = 1;
  double path_batch_lin_coeff = 0.0;

  enum class StepRule { Constant, HarmonicTwo, OneOverT };
  StepRule step_rule = StepRule::OneOverT;
  double eta_const = 0.0;

  HvpMethod hvp = HvpMethod::exact();
  long batch_cap = 100000;

  bool is_anchor(int t) const;
  long anchor_batch(int t) const;  // capped size
  long path_batch(int t) const;
  bool anchor_batch_capped(int t) const;
  bool path_batch_capped(int t) const;
  double eta(int t) const;
};

// Theorem-prescribed schedules: epoch/batch/step formulas from the stated
// constants, fractional batches rounded up and truncated at batch_cap.
SolverSchedule schedule_from_epsilon(SolverKind kind, const SmoothnessProfile& profile,
                                     double epsilon, long batch_cap = 100000);

// Same formulas with G, lbar, D given directly.
SolverSchedule schedule_from_constants(SolverKind kind, double G, double lbar_value, double D,
                                       double epsilon, long batch_cap = 100000);

// Batch sizes for the multilinear sparse-estimator run, parameterized by the
// matroid rank r, the dimension d, and the marginal bound D_f. The leading
// constant is exposed as a multiplier (default 1).
SolverSchedule multilinear_schedule(double epsilon, int rank, int dim, double marginal_bound,
                                    double multiplier = 1.0, long batch_cap = 100000);

// Default finite-difference step: lbar * eps^2 / (16 D L2 sqrt(1 + eps T) + 1).
double default_hvp_delta(const SmoothnessProfile& profile, double epsilon, int T);

// Fails fast when delta is too large for the variance analysis to absorb the
// finite-difference error over a horizon of T iterations with path batches of
// at least path_batch_min samples.
void check_delta_smallness(const SmoothnessProfile& profile, double epsilon, int T,
                           long path_batch_min, double delta);

struct TraceRow {
  int t = 0;
  double eta = 0.0;
  long batch_anchor = 0;
  long batch_path = 0;
  long oracle_calls = 0;  // cumulative
  double f_value = 0.0;
  bool f_is_exact = false;
  double fw_gap = 0.0;
  bool gap_is_exact = false;
  double wallclock_ms = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;  // T + 1 rows, t = 0..T
  Vec output;                  // x^T, or the uniformly sampled iterate
  int output_iter = 0;
  bool batch_cap_hit = false;
  std::vector<std::string> warnings;

  long total_oracle_calls() const { return rows.empty() ? 0 : rows.back().oracle_calls; }
  double final_f() const { return rows.empty() ? 0.0 : rows.back().f_value; }
  double min_fw_gap() const;
};

// How per-row f/gap columns are produced. Exact callables win when present;
// otherwise the engine's Monte-Carlo estimates are used with the report-phase
// streams, which never touch the solver's sample budget.
struct Reporting {
  std::function<double(const Vec&)> exact_value;
  std::function<Vec(const Vec&)> exact_grad;
  long mc_value_samples = 10000;
  long mc_grad_samples = 10000;
  bool record_wallclock = false;  // off by default so traces are reproducible
};

// Observer hook for tests; called once per iteration with the estimate in use.
using IterObserver = std::function<void(int t, const Vec& x, const Vec& g)>;

struct SolverOptions {
  std::optional<Vec> x0;  // default: region.lmo(0)
  Reporting reporting;
  IterObserver observer;
};

// Frank-Wolfe loop with the epoch anchor rule; returns the uniformly sampled
// iterate as output.
RunTrace sfw_nonconvex(const GradientEngine& engine, const FeasibleRegion& region,
                       const SolverSchedule& schedule, uint64_t master_seed,
                       const SolverOptions& options = {});

// Frank-Wolfe loop with power-of-two anchors (plus t = 0) and eta_t = 2/(t+2);
// returns the final iterate.
RunTrace sfw_convex(const GradientEngine& engine, const FeasibleRegion& region,
                    const SolverSchedule& schedule, uint64_t master_seed,
                    const SolverOptions& options = {});

// Continuous-greedy loop: x starts at 0, moves by v/T each step, and only the
// final iterate is guaranteed feasible.
RunTrace scg_pp(const GradientEngine& engine, const FeasibleRegion& region,
                const SolverSchedule& schedule, uint64_t master_seed,
                const SolverOptions& options = {});

// Measured variant: the LMO runs over the region shrunk by ubar - x^t, so the
// trajectory stays below ubar coordinatewise. Requires a down-closed region.
RunTrace smcg_pp(const GradientEngine& engine, const FeasibleRegion& region, const Vec& ubar,
                 const SolverSchedule& schedule, uint64_t master_seed,
                 const SolverOptions& options = {});

// max_{u in region} <grad, u - x>, one LMO call.
double fw_gap(const Vec& grad, const FeasibleRegion& region, const Vec& x);

// Momentum-estimator continuous greedy: g <- (1 - rho_t) g + rho_t * fresh
// minibatch gradient. Comparison baseline.
RunTrace baseline_scg_momentum(const GradientEngine& engine, const FeasibleRegion& region, int T,
                               const std::function<double(int)>& rho_schedule, long batch_per_iter,
                               uint64_t master_seed, const SolverOptions& options = {});

// Frank-Wolfe with a fresh minibatch every iteration and no gradient reuse.
RunTrace baseline_sfw_vanilla(const GradientEngine& engine, const FeasibleRegion& region, int T,
                              const std::function<long(int)>& batch_growth, uint64_t master_seed,
                              const SolverOptions& options = {});

}  // namespace nocg

#endif  // NOCG_SOLVERS_HPP
