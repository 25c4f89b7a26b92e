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

#ifndef NOCG_SUBMODULAR_HPP
#define NOCG_SUBMODULAR_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "nocg/problems.hpp"
#include "nocg/rng.hpp"
#include "nocg/vec.hpp"

namespace nocg {

// Ground sets are index sets {0..d-1}, represented as bitmasks (d <= 64).
using SetMask = uint64_t;

inline bool mask_has(SetMask s, int i) { return (s >> i) & 1ULL; }
inline SetMask mask_with(SetMask s, int i) { return s | (1ULL << i); }
inline SetMask mask_without(SetMask s, int i) { return s & ~(1ULL << i); }
int mask_popcount(SetMask s);
std::vector<int> mask_elements(SetMask s);

// One realization f_gamma of the stochastic set function.
struct SetFunctionSample {
  std::function<double(SetMask)> eval;
};

// f(S) = E_gamma [f_gamma(S)], nonnegative. Families built from a finite
// scenario list carry an exact expected evaluator and an exact marginal
// bound D_f = sqrt(E[D_gamma^2]) with D_gamma = max_i f_gamma({i}).
struct StochasticSetFunction {
  int ground_size = 0;
  std::function<SetFunctionSample(RngStream&)> sampler;
  std::function<double(SetMask)> expected_eval;  // empty when unavailable
  double marginal_bound = 0.0;                   // D_f

  bool has_expected() const { return static_cast<bool>(expected_eval); }
};

struct MatroidConstraint {
  enum class Kind { Cardinality, Partition };
  Kind kind = Kind::Cardinality;
  int dim = 0;
  int k = 0;                              // Cardinality
  std::vector<std::vector<int>> blocks;   // Partition
  std::vector<int> caps;

  static MatroidConstraint cardinality(int dim, int k);
  static MatroidConstraint partition(int dim, std::vector<std::vector<int>> blocks,
                                     std::vector<int> caps);

  int rank() const;
  bool feasible(SetMask s) const;
};

// Exact multilinear extension by subset enumeration (d <= 20).
double multilinear_value_exact(const StochasticSetFunction& f, const Vec& x);

// Coordinate partial dF/dx_i = F(x; x_i <- 1) - F(x; x_i <- 0).
double multilinear_grad_exact(const StochasticSetFunction& f, const Vec& x, int i);
Vec multilinear_grad_exact(const StochasticSetFunction& f, const Vec& x);

// Cross partial via the four pinned evaluations; zero on the diagonal.
double multilinear_hessian_entry_exact(const StochasticSetFunction& f, const Vec& x, int i, int j);
Mat multilinear_hessian_exact(const StochasticSetFunction& f, const Vec& x);

// Unbiased gradient estimate at x from m (gamma, z) samples, z ~ Bernoulli(x):
// per coordinate, f_gamma(N(z) + i) - f_gamma(N(z) - i) averaged over the batch.
Vec multilinear_anchor_gradient(const StochasticSetFunction& f, const Vec& x, long m,
                                const StreamSeq& seq);

// Unbiased estimate of grad F(x_cur) - grad F(x_prev) from sparse sampled
// Hessian entries along the segment; touches only columns where the
// displacement is nonzero, so each sample costs O(nnz(displacement) * d)
// set-function evaluations.
Vec multilinear_delta_estimate(const StochasticSetFunction& f, const Vec& x_prev,
                               const Vec& x_cur, long m, const StreamSeq& seq);

struct BruteForceResult {
  SetMask best_set = 0;
  double value = 0.0;
};

// Exhaustive maximum of the expected set function over the independent sets
// (d <= 20). Ties break toward the lexicographically smallest mask.
BruteForceResult brute_force_opt(const StochasticSetFunction& f,
                                 const MatroidConstraint& constraint);

enum class RoundingMode { IndependentSample, Pipage };

// Converts a fractional point in the matroid polytope to a feasible set.
// IndependentSample includes i with probability x_i, then drops the lowest
// exact-marginal members until feasible. Pipage (cardinality constraints
// only) is deterministic and never decreases the exact multilinear value.
SetMask round_to_set(const Vec& x, const MatroidConstraint& constraint,
                     const StochasticSetFunction& f, RoundingMode mode, RngStream& rng);

// Wraps f as a non-oblivious objective: z ~ product Bernoulli(x) jointly with
// gamma, F_tilde(x; z, gamma) = f_gamma(N(z)). The per-sample value does not
// depend on x, so the sampled x-gradient is identically zero. Exact oracles
// are attached when the family has an expected evaluator and d <= 20.
std::unique_ptr<NonObliviousObjective> as_non_oblivious(const StochasticSetFunction& f);

// Built-in families.

// f(S) = sum of universe weights covered by S; covers[i] is the universe
// bitmask element i covers. Monotone, deterministic.
StochasticSetFunction make_weighted_coverage(int ground_size, const std::vector<double>& weights,
                                             const std::vector<SetMask>& covers);

// f_gamma(S) = sum_c max_{i in S} W_gamma[c][i] with gamma a uniform draw
// from the scenario list. Monotone, stochastic.
StochasticSetFunction make_facility_location(int ground_size,
                                             const std::vector<std::vector<Vec>>& scenarios);

// f(S) = total weight of arcs leaving S. Nonnegative, non-monotone.
struct Arc {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};
StochasticSetFunction make_directed_cut(int ground_size, const std::vector<Arc>& arcs);

// f(S) = sum of nonnegative per-element weights.
StochasticSetFunction make_modular(const std::vector<double>& weights);

}  // namespace nocg

#endif  // NOCG_SUBMODULAR_HPP
