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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nocg/errors.hpp"
#include "nocg/harness.hpp"

namespace {

using namespace nocg;
using namespace nocg::harness;

int cmd_run(const std::string& config, std::optional<uint64_t> seed, const std::string& out) {
  const Experiment exp = load_experiment(config);
  const std::vector<RunSummary> summaries = run(exp, seed, out);
  for (const RunSummary& s : summaries) {
    std::printf("seed=%llu final_f=%.10g oracle_calls=%ld", (unsigned long long)s.seed, s.final_f,
                s.oracle_calls);
    if (s.opt_value) std::printf(" opt=%.10g", *s.opt_value);
    if (s.ratio) std::printf(" ratio=%.6f", *s.ratio);
    std::printf(" trace=%s\n", s.trace_path.c_str());
    for (const std::string& w : s.warnings) std::printf("  warning: %s\n", w.c_str());
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& param,
              const std::vector<double>& values, const std::string& out) {
  const Experiment exp = load_experiment(config);
  const std::string out_dir = out.empty() ? exp.out_dir : out;
  const std::vector<SweepRow> rows = sweep(exp, param, values, out_dir);
  std::printf("%-14s %-18s %-18s %-14s\n", param.c_str(), "final_f", "suboptimality",
              "oracle_calls");
  for (const SweepRow& r : rows)
    std::printf("%-14.6g %-18.10g %-18.10g %-14ld\n", r.param_value, r.final_f, r.suboptimality,
                r.oracle_calls);
  return kExitOk;
}

int cmd_check(const std::string& suite, uint64_t seed) {
  const std::vector<CheckResult> results = check_suite(suite, seed);
  bool all_pass = true;
  for (const CheckResult& r : results) {
    std::printf("%s  %s%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.empty() ? "" : ": ", r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : 1;
}

int cmd_brute_force(const std::string& config) {
  const Experiment exp = load_experiment(config);
  if (!exp.set_function || !exp.constraint)
    throw ConfigError("brute-force requires a set-function family over a matroid region");
  const BruteForceResult opt = brute_force_opt(*exp.set_function, *exp.constraint);
  std::printf("opt_value=%.10g opt_set={", opt.value);
  bool first = true;
  for (int e : mask_elements(opt.best_set)) {
    std::printf("%s%d", first ? "" : ",", e);
    first = false;
  }
  std::printf("}\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection-free stochastic optimization toolkit"};
  app.require_subcommand(1);

  std::string config, out_dir, param = "T", suite = "all";
  std::optional<uint64_t> seed;
  uint64_t check_seed = 20250801;
  std::vector<double> values;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute a configured experiment");
  run_cmd->add_option("--config", config, "JSON config path")->required();
  uint64_t seed_value = 0;
  bool seed_set = false;
  run_cmd->add_option("--seed", seed_value, "Override the master seed")
      ->each([&](const std::string&) { seed_set = true; });
  run_cmd->add_option("--out", out_dir, "Output directory override");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Repeat a run over a parameter grid");
  sweep_cmd->add_option("--config", config, "JSON config path")->required();
  sweep_cmd->add_option("--param", param, "Swept parameter: T or epsilon")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep_cmd->add_option("--out", out_dir, "Output directory override");

  CLI::App* check_cmd = app.add_subcommand("check", "Run an invariant suite");
  check_cmd->add_option("suite", suite, "estimators|submodular|solvers|all");
  check_cmd->add_option("--seed", check_seed, "Suite seed");

  CLI::App* bf_cmd = app.add_subcommand("brute-force", "Exhaustive optimum for small instances");
  bf_cmd->add_option("--config", config, "JSON config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? nocg::harness::kExitOk : nocg::harness::kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      if (seed_set) seed = seed_value;
      return cmd_run(config, seed, out_dir);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(config, param, values, out_dir);
    if (check_cmd->parsed()) return cmd_check(suite, check_seed);
    if (bf_cmd->parsed()) return cmd_brute_force(config);
  } catch (const nocg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return nocg::harness::kExitConfigError;
  } catch (const nocg::SizeLimitError& e) {
    std::fprintf(stderr, "size limit: %s\n", e.what());
    return nocg::harness::kExitSizeLimit;
  } catch (const nocg::InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return nocg::harness::kExitInvariantViolation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return nocg::harness::kExitConfigError;
  }
  return nocg::harness::kExitConfigError;
}
