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

#include "doctest.h"
#include "nocg/errors.hpp"
#include "nocg/solvers.hpp"

using namespace nocg;

namespace {

constexpr uint64_t kSeed = 61005;

// F(x) = -|x - c|^2 + const over the unit box.
std::unique_ptr<NonObliviousObjective> centered_quadratic(const Vec& c) {
  const int d = static_cast<int>(c.size());
  Mat A(d, d);
  for (int i = 0; i < d; ++i) A(i, i) = 2.0;
  Vec b(c.size());
  for (size_t i = 0; i < c.size(); ++i) b[i] = 2.0 * c[i];
  return make_deterministic_quadratic(A, b, 0.0);
}

Reporting exact_reporting(const std::shared_ptr<NonObliviousObjective>& obj) {
  Reporting rep;
  rep.exact_value = [obj](const Vec& x) { return obj->exact_value(x); };
  rep.exact_grad = [obj](const Vec& x) { return obj->exact_grad(x); };
  return rep;
}

StochasticSetFunction pair_coverage() { return make_weighted_coverage(2, {1.0}, {1ULL, 1ULL}); }

}  // namespace

TEST_CASE("schedules substitute the stated formulas") {
  SUBCASE("continuous greedy") {
    const SolverSchedule s =
        schedule_from_constants(SolverKind::ScgPP, 1.0, 1.0, 1.0, 0.1);
    CHECK(s.anchor_batch(0) == 50);
    CHECK(s.path_batch(1) == 5);
    CHECK(s.iterations == 10);
    CHECK(s.eta(3) == doctest::Approx(0.1).epsilon(1e-14));
  }
  SUBCASE("epoch-anchored frank-wolfe") {
    const SolverSchedule s =
        schedule_from_constants(SolverKind::SfwNonconvex, 1.0, std::sqrt(28.0), 1.0, 0.1);
    CHECK(s.q == 1);
    CHECK(s.anchor_batch(0) == 13);
    CHECK(s.path_batch(1) == 20);
    CHECK(s.eta(0) == doctest::Approx(0.1 / std::sqrt(28.0)).epsilon(1e-12));
  }
  SUBCASE("power-of-two anchored frank-wolfe") {
    const SolverSchedule s = schedule_from_constants(SolverKind::SfwConvex, 1.0, 1.0, 1.0, 0.1);
    CHECK(s.eta(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.path_batch(0) == 32);
    CHECK(s.anchor_batch(0) == 1);
    CHECK(s.is_anchor(0));
    CHECK(s.is_anchor(1));
    CHECK(s.is_anchor(8));
    CHECK_FALSE(s.is_anchor(12));
  }
  SUBCASE("epsilon domain") {
    CHECK_THROWS_AS(schedule_from_constants(SolverKind::ScgPP, 1.0, 1.0, 1.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_constants(SolverKind::ScgPP, 1.0, 1.0, 1.0, 1.5),
                    std::invalid_argument);
  }
  SUBCASE("batch caps truncate and flag") {
    SolverSchedule s = schedule_from_constants(SolverKind::ScgPP, 10.0, 1.0, 1.0, 0.01, 100);
    CHECK(s.anchor_batch(0) == 100);
    CHECK(s.anchor_batch_capped(0));
  }
}

TEST_CASE("finite-difference step validation") {
  SmoothnessProfile profile{1.0, 1.0, 1.0, 0.5, 1.0};
  const double delta = default_hvp_delta(profile, 0.1, 10);
  CHECK(delta > 0.0);
  CHECK_NOTHROW(check_delta_smallness(profile, 0.1, 10, 5, delta));
  CHECK_THROWS_AS(check_delta_smallness(profile, 0.1, 10, 5, 1e3), std::invalid_argument);
}

TEST_CASE("frank-wolfe gap") {
  const FeasibleRegion box = FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0});
  std::shared_ptr<NonObliviousObjective> obj = centered_quadratic({0.5, 0.5});
  CHECK(fw_gap(obj->exact_grad({0.5, 0.5}), box, {0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(fw_gap(obj->exact_grad({0.0, 0.0}), box, {0.0, 0.0}) ==
        doctest::Approx(2.0).epsilon(1e-13));
  // Linear objective at the maximizing vertex.
  const Vec grad = {1.0, 2.0};
  const Vec vertex = box.lmo(grad);
  CHECK(fw_gap(grad, box, vertex) == doctest::Approx(0.0));
}

TEST_CASE("frank-wolfe loops on exact oracles") {
  const FeasibleRegion box = FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0});
  std::shared_ptr<NonObliviousObjective> obj = centered_quadratic({0.5, 0.5});
  auto engine = make_exact_engine(*obj);
  SolverOptions options;
  options.reporting = exact_reporting(obj);

  SUBCASE("nonconvex variant reaches a small stationarity gap") {
    // True constants: B = sup F = 0.5, G = sup |grad| = 2, L = 2.
    SolverSchedule s = schedule_from_constants(SolverKind::SfwNonconvex, 2.0,
                                               lbar(0.5, 2.0, 2.0), box.diameter(), 0.1);
    s.iterations = 200;
    const RunTrace trace = sfw_nonconvex(*engine, box, s, kSeed, options);
    CHECK(trace.rows.size() == 201);
    CHECK(trace.min_fw_gap() <= 5.0 * 0.1 * box.diameter());
    CHECK(trace.output_iter >= 1);
    CHECK(trace.output_iter <= 200);
  }
  SUBCASE("single iteration takes one oracle step") {
    SolverSchedule s = schedule_from_constants(SolverKind::SfwNonconvex, 2.0,
                                               lbar(0.5, 2.0, 2.0), box.diameter(), 0.1);
    s.iterations = 1;
    const RunTrace trace = sfw_nonconvex(*engine, box, s, kSeed, options);
    const Vec x0 = box.lmo({0.0, 0.0});
    const Vec v0 = box.lmo(obj->exact_grad(x0));
    const double eta = s.eta(0);
    for (size_t i = 0; i < 2; ++i)
      CHECK(trace.output[i] == doctest::Approx(x0[i] + eta * (v0[i] - x0[i])).epsilon(1e-15));
  }
  SUBCASE("zero step size freezes the trace") {
    SolverSchedule s = schedule_from_constants(SolverKind::SfwNonconvex, 2.0, 10.0, 1.0, 0.1);
    s.step_rule = SolverSchedule::StepRule::Constant;
    s.eta_const = 0.0;
    s.iterations = 5;
    const RunTrace trace = sfw_nonconvex(*engine, box, s, kSeed, options);
    for (const TraceRow& row : trace.rows) {
      CHECK(row.f_value == trace.rows.front().f_value);
      CHECK(row.fw_gap == trace.rows.front().fw_gap);
    }
  }
  SUBCASE("convex variant satisfies the rate bound at every t") {
    SmoothnessProfile profile{0.6, 2.0, 2.0, 0.0, box.diameter()};
    SolverSchedule s = schedule_from_epsilon(SolverKind::SfwConvex, profile, 0.05);
    s.iterations = 256;
    const RunTrace trace = sfw_convex(*engine, box, s, kSeed, options);
    const double f_star = obj->exact_value({0.5, 0.5});
    const double lb = lbar(profile);
    const double gap0 = f_star - trace.rows.front().f_value;
    const double D2 = profile.D * profile.D;
    for (const TraceRow& row : trace.rows) {
      CHECK(f_star - row.f_value <= (28.0 * lb * D2 + gap0) / (row.t + 2.0) + 1e-9);
    }
    CHECK(f_star - trace.rows.back().f_value <=
          3.0 / (256.0 + 2.0) * (28.0 * lb * D2 + gap0));
  }
  SUBCASE("starting at the optimum keeps suboptimality on the rate curve") {
    SmoothnessProfile profile{0.6, 2.0, 2.0, 0.0, box.diameter()};
    SolverSchedule s = schedule_from_epsilon(SolverKind::SfwConvex, profile, 0.1);
    s.iterations = 64;
    SolverOptions opt2 = options;
    opt2.x0 = Vec{0.5, 0.5};
    const RunTrace trace = sfw_convex(*engine, box, s, kSeed, opt2);
    const double f_star = obj->exact_value({0.5, 0.5});
    CHECK(f_star - trace.rows.front().f_value == doctest::Approx(0.0));
    const double lb = lbar(profile);
    for (const TraceRow& row : trace.rows)
      CHECK(f_star - row.f_value <= 28.0 * lb * profile.D * profile.D / (row.t + 2.0) + 1e-9);
  }
  SUBCASE("linear objectives are solved by the first oracle call") {
    Mat A(3, 3);
    std::shared_ptr<NonObliviousObjective> lin =
        make_deterministic_quadratic(A, {0.5, 2.0, -1.0}, 0.0);
    auto lin_engine = make_exact_engine(*lin);
    const FeasibleRegion simplex = FeasibleRegion::scaled_simplex(3, 1.0);
    SolverSchedule s = schedule_from_constants(SolverKind::SfwConvex, 2.0, 8.0, 1.0, 0.1);
    s.iterations = 8;
    SolverOptions lin_options;
    lin_options.reporting = exact_reporting(lin);
    const RunTrace trace = sfw_convex(*lin_engine, simplex, s, kSeed, lin_options);
    // eta_0 = 1 lands on the maximizing vertex immediately.
    CHECK(trace.rows[1].f_value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(trace.rows.back().f_value == doctest::Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("continuous greedy loops") {
  const StochasticSetFunction f = pair_coverage();
  std::shared_ptr<NonObliviousObjective> obj(as_non_oblivious(f));
  auto engine = make_exact_engine(*obj);
  SolverOptions options;
  options.reporting = exact_reporting(obj);
  const FeasibleRegion region = FeasibleRegion::cardinality(2, 1);

  SUBCASE("one exact step lands on the tie-broken vertex") {
    SolverSchedule s = schedule_from_constants(SolverKind::ScgPP, 1.0, 4.0, 1.0, 0.5);
    s.iterations = 1;
    const RunTrace trace = scg_pp(*engine, region, s, kSeed, options);
    CHECK(trace.output == Vec{1.0, 0.0});
    CHECK(trace.final_f() == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("two steps average two vertices and stay bounded") {
    SolverSchedule s = schedule_from_constants(SolverKind::ScgPP, 1.0, 4.0, 1.0, 0.5);
    s.iterations = 2;
    const RunTrace trace = scg_pp(*engine, region, s, kSeed, options);
    for (double xi : trace.output) {
      CHECK(xi >= 0.0);
      CHECK(xi <= 1.0 + 1e-12);
    }
    CHECK(region.contains(trace.output, 1e-9));
  }
  SUBCASE("modular objectives are solved exactly in one step") {
    const StochasticSetFunction m = make_modular({0.5, 2.0, 1.0});
    std::shared_ptr<NonObliviousObjective> mobj(as_non_oblivious(m));
    auto mengine = make_exact_engine(*mobj);
    SolverSchedule s = schedule_from_constants(SolverKind::ScgPP, 1.0, 4.0, 1.0, 0.5);
    s.iterations = 1;
    SolverOptions mopt;
    mopt.reporting = exact_reporting(mobj);
    const RunTrace trace =
        scg_pp(*mengine, FeasibleRegion::cardinality(3, 2), s, kSeed, mopt);
    CHECK(trace.final_f() ==
          doctest::Approx(brute_force_opt(m, MatroidConstraint::cardinality(3, 2)).value)
              .epsilon(1e-13));
  }
  SUBCASE("partition constraints pick the best element per block") {
    const StochasticSetFunction m = make_modular({0.5, 2.0, 1.0, 0.3, 0.9});
    std::shared_ptr<NonObliviousObjective> mobj(as_non_oblivious(m));
    auto mengine = make_exact_engine(*mobj);
    const FeasibleRegion part = FeasibleRegion::partition(5, {{0, 1, 2}, {3, 4}}, {1, 1});
    SolverSchedule s = schedule_from_constants(SolverKind::ScgPP, 1.0, 4.0, 1.0, 0.5);
    s.iterations = 1;
    SolverOptions mopt;
    mopt.reporting = exact_reporting(mobj);
    const RunTrace trace = scg_pp(*mengine, part, s, kSeed, mopt);
    const MatroidConstraint constraint = MatroidConstraint::partition(5, {{0, 1, 2}, {3, 4}}, {1, 1});
    CHECK(trace.output == Vec{0.0, 1.0, 0.0, 0.0, 1.0});
    CHECK(trace.final_f() == doctest::Approx(brute_force_opt(m, constraint).value).epsilon(1e-13));
  }
  SUBCASE("iterates grow coordinatewise under nonnegative vertices") {
    SolverSchedule s = schedule_from_constants(SolverKind::ScgPP, 1.0, 4.0, 1.0, 0.1);
    Vec last(2, 0.0);
    bool monotone = true;
    SolverOptions watch = options;
    watch.observer = [&](int, const Vec& x, const Vec&) {
      for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < last[i] - 1e-15) monotone = false;
      last = x;
    };
    scg_pp(*engine, region, s, kSeed, watch);
    CHECK(monotone);
  }
}

TEST_CASE("measured continuous greedy") {
  const StochasticSetFunction cut = make_directed_cut(
      4, {{0, 1, 1.0}, {1, 2, 0.8}, {2, 3, 0.6}, {3, 0, 0.4}, {0, 2, 0.5}, {2, 0, 0.3}});
  std::shared_ptr<NonObliviousObjective> obj(as_non_oblivious(cut));
  auto engine = make_exact_engine(*obj);
  SolverOptions options;
  options.reporting = exact_reporting(obj);
  const FeasibleRegion region = FeasibleRegion::cardinality(4, 2);

  SUBCASE("zero caps freeze the iterate at the origin") {
    SolverSchedule s = schedule_from_constants(SolverKind::SmcgPP, 1.0, 4.0, 1.0, 0.25);
    s.iterations = 4;
    const RunTrace trace = smcg_pp(*engine, region, Vec(4, 0.0), s, kSeed, options);
    CHECK(trace.output == Vec(4, 0.0));
    CHECK(trace.final_f() ==
          doctest::Approx(multilinear_value_exact(cut, Vec(4, 0.0))).epsilon(1e-13));
  }
  SUBCASE("trajectory respects the caps and clears the 1/e bar") {
    SolverSchedule s = schedule_from_constants(SolverKind::SmcgPP, 1.0, 4.0, 1.0, 0.05);
    s.iterations = 20;
    const Vec ubar = region.upper_bounds();
    bool below = true;
    SolverOptions watch = options;
    watch.observer = [&](int, const Vec& x, const Vec&) {
      for (size_t i = 0; i < x.size(); ++i)
        if (x[i] > ubar[i] + 1e-12) below = false;
    };
    const RunTrace trace = smcg_pp(*engine, region, ubar, s, kSeed, watch);
    CHECK(below);
    const double opt = brute_force_opt(cut, MatroidConstraint::cardinality(4, 2)).value;
    CHECK(trace.final_f() >= opt / std::exp(1.0) - 0.05 * opt);
  }
  SUBCASE("shrinking can only restrict the monotone objective") {
    const StochasticSetFunction cov = pair_coverage();
    std::shared_ptr<NonObliviousObjective> cobj(as_non_oblivious(cov));
    auto cengine = make_exact_engine(*cobj);
    const FeasibleRegion creg = FeasibleRegion::cardinality(2, 1);
    SolverSchedule scg_s = schedule_from_constants(SolverKind::ScgPP, 1.0, 4.0, 1.0, 0.1);
    SolverSchedule smcg_s = scg_s;
    smcg_s.kind = SolverKind::SmcgPP;
    SolverOptions copt;
    copt.reporting = exact_reporting(cobj);
    const RunTrace plain = scg_pp(*cengine, creg, scg_s, kSeed, copt);
    const RunTrace measured =
        smcg_pp(*cengine, creg, creg.upper_bounds(), smcg_s, kSeed, copt);
    CHECK(measured.final_f() <= plain.final_f() + 1e-12);
  }
  SUBCASE("non-down-closed regions are rejected") {
    SolverSchedule s = schedule_from_constants(SolverKind::SmcgPP, 1.0, 4.0, 1.0, 0.25);
    const FeasibleRegion lifted = FeasibleRegion::box({0.5, 0.5}, {1.0, 1.0});
    auto qobj = std::shared_ptr<NonObliviousObjective>(centered_quadratic({0.75, 0.75}));
    auto qengine = make_exact_engine(*qobj);
    CHECK_THROWS_AS(smcg_pp(*qengine, lifted, {1.0, 1.0}, s, kSeed, SolverOptions{}),
                    std::invalid_argument);
  }
}

TEST_CASE("stochastic runs account for every scheduled sample") {
  auto obj = make_gaussian_family(3, 1.0, GaussianPayoff::neg_half_sq_norm());
  auto engine = make_score_engine(*obj, HvpMethod::exact());
  SmoothnessProfile profile{1.0, 1.0, 1.0, 0.0, std::sqrt(3.0)};

  SUBCASE("continuous greedy") {
    SolverSchedule s = schedule_from_epsilon(SolverKind::ScgPP, profile, 0.2);
    const RunTrace trace =
        scg_pp(*engine, FeasibleRegion::cardinality(3, 1), s, kSeed, SolverOptions{});
    long expected = 0;
    for (int t = 0; t < s.iterations; ++t)
      expected += s.is_anchor(t) ? s.anchor_batch(t) : s.path_batch(t);
    CHECK(trace.total_oracle_calls() == expected);
    CHECK(trace.rows.size() == static_cast<size_t>(s.iterations) + 1);
  }
  SUBCASE("power-of-two anchors") {
    SolverSchedule s = schedule_from_epsilon(SolverKind::SfwConvex, profile, 0.1);
    s.iterations = 20;
    const RunTrace trace = sfw_convex(*engine, FeasibleRegion::box({0.0, 0.0, 0.0}, Vec(3, 1.0)),
                                      s, kSeed, SolverOptions{});
    long expected = 0;
    for (int t = 0; t < s.iterations; ++t)
      expected += s.is_anchor(t) ? s.anchor_batch(t) : s.path_batch(t);
    CHECK(trace.total_oracle_calls() == expected);
  }
}

TEST_CASE("baselines") {
  const StochasticSetFunction f = pair_coverage();
  std::shared_ptr<NonObliviousObjective> obj(as_non_oblivious(f));
  const FeasibleRegion region = FeasibleRegion::cardinality(2, 1);

  SUBCASE("momentum with rho = 1 is a fresh minibatch method") {
    auto engine = make_multilinear_engine(f);
    std::vector<Vec> gs;
    SolverOptions options;
    options.observer = [&](int, const Vec&, const Vec& g) { gs.push_back(g); };
    baseline_scg_momentum(*engine, region, 4, [](int) { return 1.0; }, 8, kSeed, options);
    // Each estimate must equal the fresh anchor at the visited point, with
    // no leakage from previous iterations.
    Vec x(2, 0.0);
    for (int t = 0; t < 4; ++t) {
      const Vec fresh =
          engine->anchor(x, 8, StreamSeq{kSeed, phase::kAnchor, static_cast<uint64_t>(t)}).value;
      CHECK(gs[static_cast<size_t>(t)] == fresh);
      const Vec v = region.lmo(fresh);
      axpy(0.25, v, x);
    }
  }
  SUBCASE("momentum with rho = 0 after the first step freezes the direction") {
    auto engine = make_multilinear_engine(f);
    std::vector<Vec> gs;
    SolverOptions options;
    options.observer = [&](int, const Vec&, const Vec& g) { gs.push_back(g); };
    baseline_scg_momentum(*engine, region, 5, [](int t) { return t == 0 ? 1.0 : 0.0; }, 8, kSeed,
                          options);
    for (size_t t = 1; t < gs.size(); ++t) CHECK(gs[t] == gs[0]);
  }
  SUBCASE("vanilla frank-wolfe matches exact frank-wolfe on deterministic objectives") {
    auto qobj = std::shared_ptr<NonObliviousObjective>(centered_quadratic({0.5, 0.25}));
    auto score = make_score_engine(*qobj, HvpMethod::exact());
    const FeasibleRegion box = FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0});
    SolverOptions options;
    options.reporting = exact_reporting(qobj);
    const RunTrace vanilla =
        baseline_sfw_vanilla(*score, box, 16, [](int) { return 1L; }, kSeed, options);

    auto exact = make_exact_engine(*qobj);
    SolverSchedule s = schedule_from_constants(SolverKind::SfwConvex, 2.0, 8.0, 1.0, 0.1);
    s.iterations = 16;
    const RunTrace reference = sfw_convex(*exact, box, s, kSeed, options);
    for (size_t i = 0; i < vanilla.rows.size(); ++i)
      CHECK(vanilla.rows[i].f_value ==
            doctest::Approx(reference.rows[i].f_value).epsilon(1e-12));
  }
}

TEST_CASE("momentum baseline needs more samples than the recursive estimator") {
  // Same per-iteration sample budget for both methods; compare the oracle
  // calls consumed when each first clears the ratio bar, averaged over seeds.
  const StochasticSetFunction f = make_weighted_coverage(
      4, {1.0, 0.8, 0.6, 0.4, 0.5}, {0b00011ULL, 0b00110ULL, 0b01100ULL, 0b11000ULL});
  auto engine = make_multilinear_engine(f);
  const FeasibleRegion region = FeasibleRegion::cardinality(4, 2);
  const double opt = brute_force_opt(f, MatroidConstraint::cardinality(4, 2)).value;
  const double target = (1.0 - 1.0 / std::exp(1.0) - 0.05) * opt;
  const int T = 20;
  const long batch = 8;

  SolverOptions options;
  options.reporting.exact_value = [&f](const Vec& x) { return multilinear_value_exact(f, x); };
  options.reporting.exact_grad = [&f](const Vec& x) { return multilinear_grad_exact(f, x); };

  auto calls_to_target = [&](const RunTrace& trace) -> long {
    for (const TraceRow& row : trace.rows)
      if (row.f_value >= target) return row.oracle_calls;
    return trace.total_oracle_calls() + 1000000;  // never reached
  };

  double scg_mean = 0.0, momentum_mean = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    SolverSchedule schedule;
    schedule.kind = SolverKind::ScgPP;
    schedule.iterations = T;
    schedule.anchor_rule = AnchorRule::Initial;
    schedule.anchor_batch_const = batch;
    schedule.path_batch_const = batch;
    schedule.step_rule = SolverSchedule::StepRule::OneOverT;
    const RunTrace scg = scg_pp(*engine, region, schedule, kSeed + 300 + s, options);
    scg_mean += static_cast<double>(calls_to_target(scg)) / seeds;

    auto rho = [](int t) { return std::pow(4.0 / (t + 8.0), 2.0 / 3.0); };
    const RunTrace momentum =
        baseline_scg_momentum(*engine, region, T, rho, batch, kSeed + 300 + s, options);
    momentum_mean += static_cast<double>(calls_to_target(momentum)) / seeds;
  }
  CHECK(scg_mean < momentum_mean);
}

TEST_CASE("schedule kind mismatches are rejected") {
  auto obj = make_gaussian_family(2, 1.0, GaussianPayoff::neg_half_sq_norm());
  auto engine = make_score_engine(*obj, HvpMethod::exact());
  SolverSchedule s = schedule_from_constants(SolverKind::ScgPP, 1.0, 4.0, 1.0, 0.25);
  CHECK_THROWS_AS(
      sfw_convex(*engine, FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0}), s, kSeed, SolverOptions{}),
      std::invalid_argument);
}
