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

#ifndef NOCG_HARNESS_HPP
#define NOCG_HARNESS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nocg/lmo.hpp"
#include "nocg/problems.hpp"
#include "nocg/solvers.hpp"
#include "nocg/submodular.hpp"

namespace nocg::harness {

// Exit codes shared by the CLI.
constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitInvariantViolation = 3;
constexpr int kExitSizeLimit = 4;

// A fully resolved experiment: problem family, region, solver schedule,
// seeds, and output location.
struct Experiment {
  // Exactly one of objective / set_function is the primary problem; the
  // set-function path also keeps a wrapped objective for sampling.
  std::shared_ptr<NonObliviousObjective> objective;
  std::optional<StochasticSetFunction> set_function;
  std::optional<MatroidConstraint> constraint;

  FeasibleRegion region = FeasibleRegion::box({0.0}, {1.0});
  SmoothnessProfile profile;
  SolverSchedule schedule;
  std::string solver_name;   // run dispatch key
  std::string engine_name;   // "score" | "exact" | "multilinear"
  std::string family_name;
  Vec ubar;                  // SMCG++ coordinate caps
  std::optional<Vec> x0;

  // Baseline knobs.
  long baseline_batch = 1;
  double baseline_rho_power = 2.0 / 3.0;

  uint64_t master_seed = 1;
  int replications = 1;
  std::string out_dir = ".";
  bool record_wallclock = false;
  double multilinear_batch_multiplier = 1.0;
  std::optional<double> opt_value;  // known optimum for closed-form instances
};

Experiment load_experiment(const std::string& config_path);

struct RunSummary {
  uint64_t seed = 0;
  double final_f = 0.0;
  bool f_is_exact = false;
  long oracle_calls = 0;
  std::optional<double> opt_value;
  std::optional<double> ratio;
  std::vector<std::string> warnings;
  std::string trace_path;
  std::string summary_path;
};

// Executes one replication with the given master seed and writes the trace
// CSV plus the companion JSON summary.
RunSummary run_single(const Experiment& exp, uint64_t seed, const std::string& out_dir);

// Executes all replications (seeds master, master+1, ...). Returns summaries
// in replication order.
std::vector<RunSummary> run(const Experiment& exp, std::optional<uint64_t> seed_override,
                            const std::string& out_dir_override);

struct SweepRow {
  double param_value = 0.0;
  double final_f = 0.0;
  double suboptimality = 0.0;  // OPT-based when available, else NaN
  long oracle_calls = 0;
};

// Repeats run() over a parameter grid ("T" or "epsilon"), one row per value.
std::vector<SweepRow> sweep(const Experiment& exp, const std::string& param,
                            const std::vector<double>& values, const std::string& out_dir);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Statistical/exact invariant suites, runnable from the CLI.
std::vector<CheckResult> check_estimators(uint64_t seed);
std::vector<CheckResult> check_submodular(uint64_t seed);
std::vector<CheckResult> check_solvers(uint64_t seed);
std::vector<CheckResult> check_suite(const std::string& suite, uint64_t seed);

// Serializes a trace in the fixed CSV layout.
void write_trace_csv(const RunTrace& trace, const std::string& path);
std::string trace_csv_header();

}  // namespace nocg::harness

#endif  // NOCG_HARNESS_HPP
