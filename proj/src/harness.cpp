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

#include "nocg/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nocg/errors.hpp"
#include "nocg/estimators.hpp"

namespace nocg::harness {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return j;
}

Vec to_vec(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a numeric array");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(e.get<double>());
  return v;
}

Mat to_mat(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a matrix (array of rows)");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw ConfigError("ragged matrix rows");
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

FeasibleRegion parse_region(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "box") return FeasibleRegion::box(to_vec(j.at("lower")), to_vec(j.at("upper")));
  if (kind == "scaled_simplex")
    return FeasibleRegion::scaled_simplex(j.at("dim").get<int>(), j.at("radius").get<double>());
  if (kind == "cardinality")
    return FeasibleRegion::cardinality(j.at("dim").get<int>(), j.at("k").get<int>());
  if (kind == "partition") {
    std::vector<std::vector<int>> blocks;
    for (const auto& b : j.at("blocks")) blocks.push_back(b.get<std::vector<int>>());
    return FeasibleRegion::partition(j.at("dim").get<int>(), std::move(blocks),
                                     j.at("caps").get<std::vector<int>>());
  }
  throw ConfigError("unknown region kind: " + kind);
}

std::optional<MatroidConstraint> region_constraint(const FeasibleRegion& region, const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "cardinality")
    return MatroidConstraint::cardinality(j.at("dim").get<int>(), j.at("k").get<int>());
  if (kind == "partition") {
    std::vector<std::vector<int>> blocks;
    for (const auto& b : j.at("blocks")) blocks.push_back(b.get<std::vector<int>>());
    return MatroidConstraint::partition(region.dim(), std::move(blocks),
                                        j.at("caps").get<std::vector<int>>());
  }
  return std::nullopt;
}

std::vector<std::vector<Vec>> load_scenarios_csv(const std::string& path, int clients, int dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario CSV: " + path);
  std::vector<std::vector<Vec>> scenarios;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != clients * dim)
      throw ConfigError("scenario CSV row has wrong width");
    std::vector<Vec> clients_rows;
    for (int c = 0; c < clients; ++c)
      clients_rows.emplace_back(row.begin() + static_cast<long>(c) * dim,
                                row.begin() + static_cast<long>(c + 1) * dim);
    scenarios.push_back(std::move(clients_rows));
  }
  if (scenarios.empty()) throw ConfigError("scenario CSV is empty");
  return scenarios;
}

StochasticSetFunction parse_set_function(const std::string& family, const json& p) {
  if (family == "coverage") {
    const Vec weights = to_vec(p.at("weights"));
    std::vector<SetMask> covers;
    for (const auto& c : p.at("covers")) {
      SetMask mask = 0;
      for (const auto& u : c) mask |= (1ULL << u.get<int>());
      covers.push_back(mask);
    }
    return make_weighted_coverage(static_cast<int>(covers.size()),
                                  std::vector<double>(weights.begin(), weights.end()), covers);
  }
  if (family == "facility_location") {
    const int dim = p.at("dim").get<int>();
    std::vector<std::vector<Vec>> scenarios;
    if (p.contains("scenarios_csv")) {
      scenarios = load_scenarios_csv(p.at("scenarios_csv").get<std::string>(),
                                     p.at("clients").get<int>(), dim);
    } else {
      for (const auto& sc : p.at("scenarios")) {
        std::vector<Vec> clients_rows;
        for (const auto& row : sc) clients_rows.push_back(to_vec(row));
        scenarios.push_back(std::move(clients_rows));
      }
    }
    return make_facility_location(dim, scenarios);
  }
  if (family == "directed_cut") {
    std::vector<Arc> arcs;
    for (const auto& a : p.at("arcs"))
      arcs.push_back(Arc{a[0].get<int>(), a[1].get<int>(), a[2].get<double>()});
    return make_directed_cut(p.at("dim").get<int>(), arcs);
  }
  if (family == "modular") {
    const Vec w = to_vec(p.at("weights"));
    return make_modular(std::vector<double>(w.begin(), w.end()));
  }
  throw ConfigError("unknown set-function family: " + family);
}

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "sfw_nonconvex") return SolverKind::SfwNonconvex;
  if (name == "sfw_convex") return SolverKind::SfwConvex;
  if (name == "scg_pp") return SolverKind::ScgPP;
  if (name == "smcg_pp") return SolverKind::SmcgPP;
  throw ConfigError("unknown solver kind: " + name);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string trace_csv_header() {
  return "t,eta,batch_anchor,batch_path,oracle_calls,f_value,f_is_exact,fw_gap,gap_is_exact,"
         "wallclock_ms";
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trace file: " + path);
  out << trace_csv_header() << "\n";
  for (const TraceRow& r : trace.rows) {
    out << r.t << ',' << format_double(r.eta) << ',' << r.batch_anchor << ',' << r.batch_path
        << ',' << r.oracle_calls << ',' << format_double(r.f_value) << ',' << (r.f_is_exact ? 1 : 0)
        << ',' << format_double(r.fw_gap) << ',' << (r.gap_is_exact ? 1 : 0) << ','
        << format_double(r.wallclock_ms) << "\n";
  }
}

Experiment load_experiment(const std::string& config_path) {
  const json j = load_json(config_path);
  Experiment exp;
  try {
    const json& prob = j.at("problem");
    const json& reg = j.at("region");
    const json& solver = j.at("solver");

    exp.region = parse_region(reg);
    exp.family_name = prob.at("family").get<std::string>();

    if (exp.family_name == "gaussian") {
      const int dim = prob.at("dim").get<int>();
      const double sigma = prob.at("sigma").get<double>();
      GaussianPayoff payoff = GaussianPayoff::neg_half_sq_norm();
      if (prob.contains("payoff")) {
        const json& pay = prob.at("payoff");
        const std::string pk = pay.value("kind", "neg_half_sq_norm");
        if (pk == "quadratic")
          payoff = GaussianPayoff::quadratic(to_mat(pay.at("A")), to_vec(pay.at("b")));
        else if (pk != "neg_half_sq_norm")
          throw ConfigError("unknown gaussian payoff: " + pk);
      }
      exp.objective = make_gaussian_family(dim, sigma, payoff);
      exp.engine_name = prob.value("engine", "score");
    } else if (exp.family_name == "quadratic") {
      exp.objective =
          make_deterministic_quadratic(to_mat(prob.at("A")), to_vec(prob.at("b")),
                                       prob.value("c", 0.0));
      exp.engine_name = prob.value("engine", "score");
    } else {
      exp.set_function = parse_set_function(exp.family_name, prob);
      exp.constraint = region_constraint(exp.region, reg);
      exp.objective = std::shared_ptr<NonObliviousObjective>(as_non_oblivious(*exp.set_function));
      exp.engine_name = prob.value("engine", "multilinear");
    }

    if (prob.contains("opt_value")) exp.opt_value = prob.at("opt_value").get<double>();

    exp.profile.D = exp.region.diameter();
    if (prob.contains("profile")) {
      const json& pr = prob.at("profile");
      exp.profile.B = pr.value("B", 1.0);
      exp.profile.G = pr.value("G", 1.0);
      exp.profile.L = pr.value("L", 1.0);
      exp.profile.L2 = pr.value("L2", 0.0);
      exp.profile.D = pr.value("D", exp.profile.D);
    }

    exp.solver_name = solver.at("kind").get<std::string>();
    const double epsilon = solver.value("epsilon", 0.1);
    const long batch_cap = solver.value("batch_cap", 100000L);
    exp.multilinear_batch_multiplier = solver.value("batch_multiplier", 1.0);

    if (exp.solver_name == "baseline_scg_momentum" || exp.solver_name == "baseline_sfw_vanilla") {
      exp.schedule.kind = SolverKind::ScgPP;
      exp.schedule.epsilon = epsilon;
      exp.schedule.iterations = solver.value("T", 10);
      exp.schedule.batch_cap = batch_cap;
      exp.baseline_batch = solver.value("batch", 1L);
      exp.baseline_rho_power = solver.value("rho_power", 2.0 / 3.0);
    } else {
      const SolverKind kind = parse_solver_kind(exp.solver_name);
      if (exp.engine_name == "multilinear") {
        if (kind != SolverKind::ScgPP && kind != SolverKind::SmcgPP)
          throw ConfigError("multilinear engine supports scg_pp and smcg_pp only");
        exp.schedule = multilinear_schedule(epsilon, exp.region.rank(), exp.region.dim(),
                                            exp.set_function->marginal_bound,
                                            exp.multilinear_batch_multiplier, batch_cap);
        exp.schedule.kind = kind;
      } else {
        exp.schedule = schedule_from_epsilon(kind, exp.profile, epsilon, batch_cap);
      }
      if (solver.contains("T")) exp.schedule.iterations = solver.at("T").get<int>();
      if (solver.contains("overrides")) {
        const json& ov = solver.at("overrides");
        if (ov.contains("anchor_batch")) {
          exp.schedule.anchor_batch_const = ov.at("anchor_batch").get<long>();
          exp.schedule.anchor_batch_quad_coeff = 0.0;
        }
        if (ov.contains("path_batch")) {
          exp.schedule.path_batch_const = ov.at("path_batch").get<long>();
          exp.schedule.path_batch_lin_coeff = 0.0;
        }
        if (ov.contains("eta")) {
          exp.schedule.step_rule = SolverSchedule::StepRule::Constant;
          exp.schedule.eta_const = ov.at("eta").get<double>();
        }
        if (ov.contains("q")) exp.schedule.q = ov.at("q").get<int>();
      }
      if (solver.contains("hvp")) {
        const json& hv = solver.at("hvp");
        const std::string method = hv.value("method", "exact");
        if (method == "finite_difference") {
          const double delta = hv.contains("delta")
                                   ? hv.at("delta").get<double>()
                                   : default_hvp_delta(exp.profile, epsilon,
                                                       exp.schedule.iterations);
          exp.schedule.hvp = HvpMethod::finite_difference(delta);
        } else if (method != "exact") {
          throw ConfigError("unknown hvp method: " + method);
        }
      }
    }

    if (solver.contains("x0")) exp.x0 = to_vec(solver.at("x0"));
    if (solver.contains("ubar")) exp.ubar = to_vec(solver.at("ubar"));

    if (j.contains("seeds")) {
      exp.master_seed = j.at("seeds").value("master", 1ULL);
      exp.replications = j.at("seeds").value("replications", 1);
      if (exp.replications < 1) throw ConfigError("replications must be >= 1");
    }
    if (j.contains("output")) {
      exp.out_dir = j.at("output").value("dir", ".");
      exp.record_wallclock = j.at("output").value("record_wallclock", false);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
  return exp;
}

namespace {

struct EngineHolder {
  std::unique_ptr<GradientEngine> engine;
  std::shared_ptr<NonObliviousObjective> keep_alive;
};

EngineHolder build_engine(const Experiment& exp) {
  EngineHolder h;
  h.keep_alive = exp.objective;
  if (exp.engine_name == "multilinear") {
    if (!exp.set_function) throw ConfigError("multilinear engine needs a set-function family");
    h.engine = make_multilinear_engine(*exp.set_function);
  } else if (exp.engine_name == "exact") {
    h.engine = make_exact_engine(*h.keep_alive);
  } else if (exp.engine_name == "score") {
    h.engine = make_score_engine(*h.keep_alive, exp.schedule.hvp);
  } else {
    throw ConfigError("unknown engine: " + exp.engine_name);
  }
  return h;
}

Reporting build_reporting(const Experiment& exp) {
  Reporting rep;
  rep.record_wallclock = exp.record_wallclock;
  if (exp.objective && exp.objective->has_exact()) {
    std::shared_ptr<NonObliviousObjective> obj = exp.objective;
    rep.exact_value = [obj](const Vec& x) { return obj->exact_value(x); };
    rep.exact_grad = [obj](const Vec& x) { return obj->exact_grad(x); };
  }
  return rep;
}

RunTrace dispatch(const Experiment& exp, const GradientEngine& engine, uint64_t seed) {
  SolverOptions options;
  options.x0 = exp.x0;
  options.reporting = build_reporting(exp);
  if (exp.solver_name == "sfw_nonconvex") {
    SolverSchedule s = exp.schedule;
    s.kind = SolverKind::SfwNonconvex;
    return sfw_nonconvex(engine, exp.region, s, seed, options);
  }
  if (exp.solver_name == "sfw_convex") {
    SolverSchedule s = exp.schedule;
    s.kind = SolverKind::SfwConvex;
    return sfw_convex(engine, exp.region, s, seed, options);
  }
  if (exp.solver_name == "scg_pp") {
    SolverSchedule s = exp.schedule;
    s.kind = SolverKind::ScgPP;
    return scg_pp(engine, exp.region, s, seed, options);
  }
  if (exp.solver_name == "smcg_pp") {
    SolverSchedule s = exp.schedule;
    s.kind = SolverKind::SmcgPP;
    Vec ubar = exp.ubar.empty() ? exp.region.upper_bounds() : exp.ubar;
    return smcg_pp(engine, exp.region, ubar, s, seed, options);
  }
  if (exp.solver_name == "baseline_scg_momentum") {
    const double power = exp.baseline_rho_power;
    auto rho = [power](int t) { return std::pow(4.0 / (t + 8.0), power); };
    return baseline_scg_momentum(engine, exp.region, exp.schedule.iterations, rho,
                                 exp.baseline_batch, seed, options);
  }
  if (exp.solver_name == "baseline_sfw_vanilla") {
    const long batch = exp.baseline_batch;
    return baseline_sfw_vanilla(
        engine, exp.region, exp.schedule.iterations, [batch](int) { return batch; }, seed,
        options);
  }
  throw ConfigError("unknown solver: " + exp.solver_name);
}

}  // namespace

RunSummary run_single(const Experiment& exp, uint64_t seed, const std::string& out_dir) {
  if (exp.schedule.hvp.kind == HvpMethod::Kind::FiniteDifference) {
    long min_path = exp.schedule.path_batch(0);
    for (int t = 1; t <= exp.schedule.iterations; ++t)
      min_path = std::min(min_path, exp.schedule.path_batch(t));
    try {
      check_delta_smallness(exp.profile, exp.schedule.epsilon, exp.schedule.iterations, min_path,
                            exp.schedule.hvp.delta);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  EngineHolder holder = build_engine(exp);
  const RunTrace trace = dispatch(exp, *holder.engine, seed);

  std::filesystem::create_directories(out_dir);
  RunSummary summary;
  summary.seed = seed;
  summary.final_f = trace.rows.back().f_value;
  summary.f_is_exact = trace.rows.back().f_is_exact;
  summary.oracle_calls = trace.total_oracle_calls();
  summary.warnings = trace.warnings;

  if (exp.opt_value) {
    summary.opt_value = exp.opt_value;
  } else if (exp.set_function && exp.constraint && exp.set_function->has_expected() &&
             exp.set_function->ground_size <= 20) {
    summary.opt_value = brute_force_opt(*exp.set_function, *exp.constraint).value;
  }
  if (summary.opt_value && *summary.opt_value > 0.0)
    summary.ratio = summary.final_f / *summary.opt_value;

  std::ostringstream base;
  base << out_dir << "/trace_seed" << seed << ".csv";
  summary.trace_path = base.str();
  write_trace_csv(trace, summary.trace_path);

  json js;
  js["seed"] = seed;
  js["solver"] = exp.solver_name;
  js["family"] = exp.family_name;
  js["engine"] = exp.engine_name;
  js["T"] = exp.schedule.iterations;
  js["epsilon"] = exp.schedule.epsilon;
  js["final_f"] = summary.final_f;
  js["f_is_exact"] = summary.f_is_exact;
  js["oracle_calls"] = summary.oracle_calls;
  js["output_iter"] = trace.output_iter;
  js["output"] = trace.output;
  if (summary.opt_value) js["opt"] = *summary.opt_value;
  if (summary.ratio) js["ratio"] = *summary.ratio;
  js["warnings"] = summary.warnings;

  std::ostringstream spath;
  spath << out_dir << "/summary_seed" << seed << ".json";
  summary.summary_path = spath.str();
  std::ofstream out(summary.summary_path, std::ios::binary);
  out << js.dump(2) << "\n";
  return summary;
}

std::vector<RunSummary> run(const Experiment& exp, std::optional<uint64_t> seed_override,
                            const std::string& out_dir_override) {
  const std::string out_dir = out_dir_override.empty() ? exp.out_dir : out_dir_override;
  const uint64_t base_seed = seed_override.value_or(exp.master_seed);
  std::vector<RunSummary> all;
  for (int k = 0; k < exp.replications; ++k)
    all.push_back(run_single(exp, base_seed + static_cast<uint64_t>(k), out_dir));
  return all;
}

std::vector<SweepRow> sweep(const Experiment& exp, const std::string& param,
                            const std::vector<double>& values, const std::string& out_dir) {
  if (values.empty()) throw ConfigError("sweep: empty value list");
  if (param != "T" && param != "epsilon") throw ConfigError("sweep: unsupported parameter " + param);
  std::vector<SweepRow> rows;
  for (double v : values) {
    Experiment patched = exp;
    if (param == "T") {
      patched.schedule.iterations = static_cast<int>(v);
    } else {
      if (patched.engine_name == "multilinear") {
        patched.schedule = multilinear_schedule(v, patched.region.rank(), patched.region.dim(),
                                                patched.set_function->marginal_bound,
                                                patched.multilinear_batch_multiplier,
                                                patched.schedule.batch_cap);
        patched.schedule.kind = exp.schedule.kind;
      } else {
        patched.schedule = schedule_from_epsilon(exp.schedule.kind, patched.profile, v,
                                                 patched.schedule.batch_cap);
      }
    }
    std::ostringstream sub;
    sub << out_dir << "/" << param << "_" << v;
    const RunSummary summary = run_single(patched, patched.master_seed, sub.str());
    SweepRow row;
    row.param_value = v;
    row.final_f = summary.final_f;
    row.oracle_calls = summary.oracle_calls;
    if (summary.opt_value)
      row.suboptimality = *summary.opt_value - summary.final_f;
    else
      row.suboptimality = std::nan("");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nocg::harness
