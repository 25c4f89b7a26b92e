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

#include "nocg/submodular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nocg/errors.hpp"
#include "nocg/parallel.hpp"

namespace nocg {

namespace {

constexpr int kEnumerationLimit = 20;  // 2^20 subset sums stay under a second

void require_enumerable(const StochasticSetFunction& f, const char* what) {
  if (!f.has_expected())
    throw UnsupportedOperation(std::string(what) + ": no exact expected evaluator");
  if (f.ground_size > kEnumerationLimit)
    throw SizeLimitError(std::string(what) + ": ground set too large for enumeration");
}

SetMask bernoulli_mask(const Vec& x, RngStream& rng) {
  SetMask m = 0;
  for (size_t i = 0; i < x.size(); ++i)
    if (rng.uniform01() < x[i]) m |= (1ULL << i);
  return m;
}

Vec batch_mean_rows(size_t d, size_t m, const std::function<void(size_t, double*)>& fill) {
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

int mask_popcount(SetMask s) { return __builtin_popcountll(s); }

std::vector<int> mask_elements(SetMask s) {
  std::vector<int> out;
  for (int i = 0; s != 0; ++i, s >>= 1)
    if (s & 1ULL) out.push_back(i);
  return out;
}

MatroidConstraint MatroidConstraint::cardinality(int dim, int k) {
  if (dim < 1 || k < 0 || k > dim) throw std::invalid_argument("cardinality constraint: bad k");
  MatroidConstraint c;
  c.kind = Kind::Cardinality;
  c.dim = dim;
  c.k = k;
  return c;
}

MatroidConstraint MatroidConstraint::partition(int dim, std::vector<std::vector<int>> blocks,
                                               std::vector<int> caps) {
  if (blocks.size() != caps.size())
    throw std::invalid_argument("partition constraint: blocks/caps mismatch");
  std::vector<int> seen(static_cast<size_t>(dim), 0);
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (caps[b] < 0) throw std::invalid_argument("partition constraint: negative cap");
    for (int i : blocks[b])
      if (i < 0 || i >= dim || seen[static_cast<size_t>(i)]++)
        throw std::invalid_argument("partition constraint: blocks must partition the ground set");
  }
  for (int c : seen)
    if (c != 1) throw std::invalid_argument("partition constraint: uncovered element");
  MatroidConstraint c;
  c.kind = Kind::Partition;
  c.dim = dim;
  c.blocks = std::move(blocks);
  c.caps = std::move(caps);
  return c;
}

int MatroidConstraint::rank() const {
  if (kind == Kind::Cardinality) return k;
  int r = 0;
  for (size_t b = 0; b < blocks.size(); ++b)
    r += std::min(caps[b], static_cast<int>(blocks[b].size()));
  return r;
}

bool MatroidConstraint::feasible(SetMask s) const {
  if (kind == Kind::Cardinality) return mask_popcount(s) <= k;
  for (size_t b = 0; b < blocks.size(); ++b) {
    int count = 0;
    for (int i : blocks[b])
      if (mask_has(s, i)) ++count;
    if (count > caps[b]) return false;
  }
  return true;
}

double multilinear_value_exact(const StochasticSetFunction& f, const Vec& x) {
  require_enumerable(f, "multilinear_value_exact");
  check_dim(x, static_cast<size_t>(f.ground_size), "multilinear_value_exact");
  const SetMask all = f.ground_size == 64 ? ~0ULL : ((1ULL << f.ground_size) - 1);
  double total = 0.0;
  for (SetMask s = 0;; ++s) {
    double w = 1.0;
    for (int i = 0; i < f.ground_size; ++i) w *= mask_has(s, i) ? x[static_cast<size_t>(i)]
                                                                : 1.0 - x[static_cast<size_t>(i)];
    if (w != 0.0) total += w * f.expected_eval(s);
    if (s == all) break;
  }
  return total;
}

double multilinear_grad_exact(const StochasticSetFunction& f, const Vec& x, int i) {
  if (i < 0 || i >= f.ground_size)
    throw std::invalid_argument("multilinear_grad_exact: index out of range");
  Vec pinned = x;
  pinned[static_cast<size_t>(i)] = 1.0;
  const double up = multilinear_value_exact(f, pinned);
  pinned[static_cast<size_t>(i)] = 0.0;
  return up - multilinear_value_exact(f, pinned);
}

Vec multilinear_grad_exact(const StochasticSetFunction& f, const Vec& x) {
  Vec g(static_cast<size_t>(f.ground_size));
  for (int i = 0; i < f.ground_size; ++i) g[static_cast<size_t>(i)] =
      multilinear_grad_exact(f, x, i);
  return g;
}

double multilinear_hessian_entry_exact(const StochasticSetFunction& f, const Vec& x, int i,
                                       int j) {
  if (i < 0 || i >= f.ground_size || j < 0 || j >= f.ground_size)
    throw std::invalid_argument("multilinear_hessian_entry_exact: index out of range");
  if (i == j) return 0.0;  // multilinear extensions have no diagonal curvature
  Vec pinned = x;
  auto value_with = [&](double vi, double vj) {
    pinned[static_cast<size_t>(i)] = vi;
    pinned[static_cast<size_t>(j)] = vj;
    return multilinear_value_exact(f, pinned);
  };
  return value_with(1.0, 1.0) - value_with(1.0, 0.0) - value_with(0.0, 1.0) +
         value_with(0.0, 0.0);
}

Mat multilinear_hessian_exact(const StochasticSetFunction& f, const Vec& x) {
  Mat h(f.ground_size, f.ground_size);
  for (int i = 0; i < f.ground_size; ++i)
    for (int j = 0; j < f.ground_size; ++j)
      h(i, j) = multilinear_hessian_entry_exact(f, x, i, j);
  return h;
}

Vec multilinear_anchor_gradient(const StochasticSetFunction& f, const Vec& x, long m,
                                const StreamSeq& seq) {
  if (m < 1) throw std::invalid_argument("multilinear_anchor_gradient: need m >= 1");
  const size_t d = static_cast<size_t>(f.ground_size);
  check_dim(x, d, "multilinear_anchor_gradient");
  return batch_mean_rows(d, static_cast<size_t>(m), [&](size_t idx, double* out) {
    RngStream rng = seq.at(static_cast<uint64_t>(idx));
    const SetFunctionSample gamma = f.sampler(rng);
    const SetMask n = bernoulli_mask(x, rng);
    for (int i = 0; i < f.ground_size; ++i)
      out[static_cast<size_t>(i)] = gamma.eval(mask_with(n, i)) - gamma.eval(mask_without(n, i));
  });
}

Vec multilinear_delta_estimate(const StochasticSetFunction& f, const Vec& x_prev,
                               const Vec& x_cur, long m, const StreamSeq& seq) {
  if (m < 1) throw std::invalid_argument("multilinear_delta_estimate: need m >= 1");
  const size_t d = static_cast<size_t>(f.ground_size);
  check_dim(x_prev, d, "multilinear_delta_estimate");
  check_dim(x_cur, d, "multilinear_delta_estimate");
  const Vec disp = sub(x_cur, x_prev);
  std::vector<int> support;
  for (int j = 0; j < f.ground_size; ++j)
    if (disp[static_cast<size_t>(j)] != 0.0) support.push_back(j);
  if (support.empty()) return Vec(d, 0.0);

  return batch_mean_rows(d, static_cast<size_t>(m), [&](size_t idx, double* out) {
    RngStream rng = seq.at(static_cast<uint64_t>(idx));
    const SetFunctionSample gamma = f.sampler(rng);
    const double a = rng.uniform01();
    const Vec x_of_a = convex_combination(x_prev, x_cur, a);
    const SetMask s = bernoulli_mask(x_of_a, rng);
    for (size_t c = 0; c < d; ++c) out[c] = 0.0;
    // Sampled Hessian entries hit only the displaced columns; each entry is
    // the four-set alternating sum around S.
    for (int j : support) {
      const double dj = disp[static_cast<size_t>(j)];
      const SetMask with_j = mask_with(s, j);
      const SetMask without_j = mask_without(s, j);
      for (int i = 0; i < f.ground_size; ++i) {
        if (i == j) continue;  // zero diagonal
        const double entry = gamma.eval(mask_with(with_j, i)) -
                             gamma.eval(mask_with(without_j, i)) -
                             gamma.eval(mask_without(with_j, i)) +
                             gamma.eval(mask_without(without_j, i));
        out[static_cast<size_t>(i)] += entry * dj;
      }
    }
  });
}

BruteForceResult brute_force_opt(const StochasticSetFunction& f,
                                 const MatroidConstraint& constraint) {
  require_enumerable(f, "brute_force_opt");
  if (constraint.dim != f.ground_size)
    throw std::invalid_argument("brute_force_opt: constraint dimension mismatch");
  const SetMask all = (1ULL << f.ground_size) - 1;
  BruteForceResult best;
  best.best_set = 0;
  best.value = f.expected_eval(0);
  for (SetMask s = 1; s <= all; ++s) {
    if (!constraint.feasible(s)) continue;
    const double v = f.expected_eval(s);
    if (v > best.value) {  // scan order keeps the lowest mask on ties
      best.value = v;
      best.best_set = s;
    }
  }
  return best;
}

namespace {

SetMask pipage_round(const Vec& x_in, const MatroidConstraint& constraint,
                     const StochasticSetFunction& f) {
  if (constraint.kind != MatroidConstraint::Kind::Cardinality)
    throw UnsupportedOperation("pipage rounding: cardinality constraints only");
  require_enumerable(f, "pipage rounding");
  Vec x = x_in;
  auto fractional = [&](int i) {
    const double v = x[static_cast<size_t>(i)];
    return v > 1e-12 && v < 1.0 - 1e-12;
  };
  while (true) {
    int i = -1, j = -1;
    for (int c = 0; c < f.ground_size && j < 0; ++c) {
      if (!fractional(c)) continue;
      if (i < 0)
        i = c;
      else
        j = c;
    }
    if (i < 0) break;  // integral
    if (j < 0) {
      // One fractional coordinate left; the extension is linear in it and the
      // raised endpoint is always feasible under a cardinality budget.
      Vec up = x, down = x;
      up[static_cast<size_t>(i)] = 1.0;
      down[static_cast<size_t>(i)] = 0.0;
      x = multilinear_value_exact(f, up) >= multilinear_value_exact(f, down) ? up : down;
      break;
    }
    // Move mass along e_i - e_j; the restriction is convex, so one endpoint
    // does not decrease the value. Endpoints are written exactly.
    const double xi = x[static_cast<size_t>(i)];
    const double xj = x[static_cast<size_t>(j)];
    Vec cand_a = x;  // raise i, lower j
    if (1.0 - xi <= xj) {
      cand_a[static_cast<size_t>(i)] = 1.0;
      cand_a[static_cast<size_t>(j)] = xj - (1.0 - xi);
    } else {
      cand_a[static_cast<size_t>(i)] = xi + xj;
      cand_a[static_cast<size_t>(j)] = 0.0;
    }
    Vec cand_b = x;  // lower i, raise j
    if (xi <= 1.0 - xj) {
      cand_b[static_cast<size_t>(i)] = 0.0;
      cand_b[static_cast<size_t>(j)] = xj + xi;
    } else {
      cand_b[static_cast<size_t>(i)] = xi - (1.0 - xj);
      cand_b[static_cast<size_t>(j)] = 1.0;
    }
    x = multilinear_value_exact(f, cand_a) >= multilinear_value_exact(f, cand_b) ? cand_a : cand_b;
  }
  SetMask s = 0;
  for (int c = 0; c < f.ground_size; ++c)
    if (x[static_cast<size_t>(c)] > 0.5) s = mask_with(s, c);
  return s;
}

SetMask independent_sample_round(const Vec& x, const MatroidConstraint& constraint,
                                 const StochasticSetFunction& f, RngStream& rng) {
  SetMask s = bernoulli_mask(x, rng);
  if (constraint.feasible(s)) return s;
  require_enumerable(f, "independent-sample repair");
  // Drop the member with the smallest exact marginal until feasible.
  while (!constraint.feasible(s)) {
    int victim = -1;
    double worst = 0.0;
    for (int i : mask_elements(s)) {
      // Only elements in an over-capacity scope are candidates.
      if (constraint.kind == MatroidConstraint::Kind::Partition) {
        bool over = false;
        for (size_t b = 0; b < constraint.blocks.size(); ++b) {
          int count = 0;
          bool in_block = false;
          for (int e : constraint.blocks[b]) {
            if (mask_has(s, e)) ++count;
            if (e == i) in_block = true;
          }
          if (in_block && count > constraint.caps[b]) over = true;
        }
        if (!over) continue;
      }
      const double marginal = f.expected_eval(s) - f.expected_eval(mask_without(s, i));
      if (victim < 0 || marginal < worst) {
        victim = i;
        worst = marginal;
      }
    }
    if (victim < 0) throw InvariantViolation("independent-sample repair: no removable element");
    s = mask_without(s, victim);
  }
  return s;
}

}  // namespace

SetMask round_to_set(const Vec& x, const MatroidConstraint& constraint,
                     const StochasticSetFunction& f, RoundingMode mode, RngStream& rng) {
  check_dim(x, static_cast<size_t>(f.ground_size), "round_to_set");
  if (mode == RoundingMode::Pipage) return pipage_round(x, constraint, f);
  return independent_sample_round(x, constraint, f, rng);
}

namespace {

// F_tilde(x; z, gamma) = f_gamma(N(z)) with z ~ product Bernoulli(x).
// The realization fixes both gamma and z, so the per-sample value does not
// depend on x and its x-gradient vanishes; only the score term survives.
class MultilinearObjective final : public NonObliviousObjective {
 public:
  explicit MultilinearObjective(StochasticSetFunction f) : f_(std::move(f)) {}

  int dim() const override { return f_.ground_size; }

  StochasticSample sample(const Vec& x, RngStream& rng) const override {
    check_dim(x, static_cast<size_t>(f_.ground_size), "multilinear sample");
    auto payload = std::make_shared<Payload>();
    payload->gamma = f_.sampler(rng);
    payload->members = bernoulli_mask(x, rng);
    StochasticSample s;
    s.value = payload->gamma.eval(payload->members);
    s.grad = Vec(x.size(), 0.0);
    s.logp_grad = score(payload->members, x);
    s.has_second_order = true;
    s.payload = payload;
    return s;
  }

  Vec grad_at(const StochasticSample&, const Vec& y) const override {
    return Vec(y.size(), 0.0);
  }

  Vec logp_grad_at(const StochasticSample& z, const Vec& y) const override {
    return score(payload_of(z).members, y);
  }

  bool has_second_order() const override { return true; }

  Vec hess_vec(const StochasticSample&, const Vec&, const Vec& d) const override {
    return Vec(d.size(), 0.0);
  }

  Vec logp_hess_vec(const StochasticSample& z, const Vec& y, const Vec& d) const override {
    const SetMask members = payload_of(z).members;
    Vec out(d.size(), 0.0);
    for (size_t i = 0; i < d.size(); ++i) {
      const double denom = mask_has(members, static_cast<int>(i)) ? y[i] * y[i]
                                                                  : (1.0 - y[i]) * (1.0 - y[i]);
      out[i] = -d[i] / denom;
    }
    return out;
  }

  bool has_exact() const override {
    return f_.has_expected() && f_.ground_size <= kEnumerationLimit;
  }

  double exact_value(const Vec& x) const override {
    return multilinear_value_exact(f_, x);
  }

  Vec exact_grad(const Vec& x) const override { return multilinear_grad_exact(f_, x); }

  bool has_exact_hessian() const override { return has_exact(); }

  Mat exact_hessian(const Vec& x) const override { return multilinear_hessian_exact(f_, x); }

 private:
  struct Payload {
    SetFunctionSample gamma;
    SetMask members = 0;
  };

  static const Payload& payload_of(const StochasticSample& s) {
    return *static_cast<const Payload*>(s.payload.get());
  }

  static Vec score(SetMask members, const Vec& y) {
    Vec g(y.size());
    for (size_t i = 0; i < y.size(); ++i)
      g[i] = mask_has(members, static_cast<int>(i)) ? 1.0 / y[i] : -1.0 / (1.0 - y[i]);
    return g;
  }

  StochasticSetFunction f_;
};

}  // namespace

std::unique_ptr<NonObliviousObjective> as_non_oblivious(const StochasticSetFunction& f) {
  return std::make_unique<MultilinearObjective>(f);
}

StochasticSetFunction make_weighted_coverage(int ground_size, const std::vector<double>& weights,
                                             const std::vector<SetMask>& covers) {
  if (ground_size < 1 || ground_size > 64)
    throw std::invalid_argument("coverage: ground size out of range");
  if (covers.size() != static_cast<size_t>(ground_size))
    throw std::invalid_argument("coverage: one cover mask per element required");
  if (weights.size() > 64) throw std::invalid_argument("coverage: universe too large");
  for (double w : weights)
    if (w < 0.0) throw std::invalid_argument("coverage: negative universe weight");

  auto eval = [weights, covers](SetMask s) {
    SetMask covered = 0;
    for (int i = 0; s != 0; ++i, s >>= 1)
      if (s & 1ULL) covered |= covers[static_cast<size_t>(i)];
    double total = 0.0;
    for (size_t u = 0; u < weights.size(); ++u)
      if (covered & (1ULL << u)) total += weights[u];
    return total;
  };

  StochasticSetFunction f;
  f.ground_size = ground_size;
  f.expected_eval = eval;
  f.sampler = [eval](RngStream&) { return SetFunctionSample{eval}; };
  double d_gamma = 0.0;
  for (int i = 0; i < ground_size; ++i) d_gamma = std::max(d_gamma, eval(1ULL << i));
  f.marginal_bound = d_gamma;
  return f;
}

StochasticSetFunction make_facility_location(int ground_size,
                                             const std::vector<std::vector<Vec>>& scenarios) {
  if (ground_size < 1 || ground_size > 64)
    throw std::invalid_argument("facility location: ground size out of range");
  if (scenarios.empty()) throw std::invalid_argument("facility location: no scenarios");
  for (const auto& clients : scenarios)
    for (const Vec& row : clients) {
      if (row.size() != static_cast<size_t>(ground_size))
        throw std::invalid_argument("facility location: weight row dimension mismatch");
      for (double w : row)
        if (w < 0.0) throw std::invalid_argument("facility location: negative weight");
    }

  auto scenario_eval = [](const std::vector<Vec>& clients, SetMask s) {
    double total = 0.0;
    for (const Vec& row : clients) {
      double best = 0.0;
      SetMask rest = s;
      for (int i = 0; rest != 0; ++i, rest >>= 1)
        if (rest & 1ULL) best = std::max(best, row[static_cast<size_t>(i)]);
      total += best;
    }
    return total;
  };

  StochasticSetFunction f;
  f.ground_size = ground_size;
  const size_t n = scenarios.size();
  auto shared = std::make_shared<const std::vector<std::vector<Vec>>>(scenarios);
  f.expected_eval = [shared, scenario_eval, n](SetMask s) {
    double total = 0.0;
    for (const auto& clients : *shared) total += scenario_eval(clients, s);
    return total / static_cast<double>(n);
  };
  f.sampler = [shared, scenario_eval, n](RngStream& rng) {
    size_t idx = static_cast<size_t>(rng.uniform01() * static_cast<double>(n));
    if (idx >= n) idx = n - 1;
    return SetFunctionSample{[shared, idx, scenario_eval](SetMask s) {
      return scenario_eval((*shared)[idx], s);
    }};
  };
  double sum_sq = 0.0;
  for (const auto& clients : scenarios) {
    double d_gamma = 0.0;
    for (int i = 0; i < ground_size; ++i)
      d_gamma = std::max(d_gamma, scenario_eval(clients, 1ULL << i));
    sum_sq += d_gamma * d_gamma;
  }
  f.marginal_bound = std::sqrt(sum_sq / static_cast<double>(n));
  return f;
}

StochasticSetFunction make_directed_cut(int ground_size, const std::vector<Arc>& arcs) {
  if (ground_size < 1 || ground_size > 64)
    throw std::invalid_argument("directed cut: ground size out of range");
  for (const Arc& a : arcs) {
    if (a.from < 0 || a.from >= ground_size || a.to < 0 || a.to >= ground_size)
      throw std::invalid_argument("directed cut: arc endpoint out of range");
    if (a.weight < 0.0) throw std::invalid_argument("directed cut: negative arc weight");
  }
  auto eval = [arcs](SetMask s) {
    double total = 0.0;
    for (const Arc& a : arcs)
      if (mask_has(s, a.from) && !mask_has(s, a.to)) total += a.weight;
    return total;
  };
  StochasticSetFunction f;
  f.ground_size = ground_size;
  f.expected_eval = eval;
  f.sampler = [eval](RngStream&) { return SetFunctionSample{eval}; };
  double d_gamma = 0.0;
  for (int i = 0; i < ground_size; ++i) d_gamma = std::max(d_gamma, eval(1ULL << i));
  f.marginal_bound = d_gamma;
  return f;
}

StochasticSetFunction make_modular(const std::vector<double>& weights) {
  if (weights.empty() || weights.size() > 64)
    throw std::invalid_argument("modular: ground size out of range");
  for (double w : weights)
    if (w < 0.0) throw std::invalid_argument("modular: negative weight");
  auto eval = [weights](SetMask s) {
    double total = 0.0;
    for (int i = 0; s != 0; ++i, s >>= 1)
      if (s & 1ULL) total += weights[static_cast<size_t>(i)];
    return total;
  };
  StochasticSetFunction f;
  f.ground_size = static_cast<int>(weights.size());
  f.expected_eval = eval;
  f.sampler = [eval](RngStream&) { return SetFunctionSample{eval}; };
  f.marginal_bound = *std::max_element(weights.begin(), weights.end());
  return f;
}

}  // namespace nocg
