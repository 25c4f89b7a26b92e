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

#include "nocg/lmo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nocg/errors.hpp"

namespace nocg {

FeasibleRegion FeasibleRegion::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size() || lower.empty())
    throw std::invalid_argument("box: inconsistent bounds");
  for (size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) throw std::invalid_argument("box: lower > upper");
  FeasibleRegion r;
  r.kind_ = Kind::Box;
  r.dim_ = static_cast<int>(lower.size());
  r.lower_ = std::move(lower);
  r.upper_ = std::move(upper);
  return r;
}

FeasibleRegion FeasibleRegion::scaled_simplex(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("scaled_simplex: dim >= 1 required");
  if (!(radius > 0.0)) throw std::invalid_argument("scaled_simplex: radius must be positive");
  FeasibleRegion r;
  r.kind_ = Kind::ScaledSimplex;
  r.dim_ = dim;
  r.radius_ = radius;
  return r;
}

FeasibleRegion FeasibleRegion::cardinality(int dim, int k) {
  if (dim < 1) throw std::invalid_argument("cardinality: dim >= 1 required");
  if (k < 0 || k > dim) throw std::invalid_argument("cardinality: need 0 <= k <= dim");
  FeasibleRegion r;
  r.kind_ = Kind::Cardinality;
  r.dim_ = dim;
  r.k_ = k;
  return r;
}

FeasibleRegion FeasibleRegion::partition(int dim, std::vector<std::vector<int>> blocks,
                                         std::vector<int> caps) {
  if (dim < 1) throw std::invalid_argument("partition: dim >= 1 required");
  if (blocks.size() != caps.size()) throw std::invalid_argument("partition: blocks/caps mismatch");
  std::vector<int> seen(static_cast<size_t>(dim), 0);
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (caps[b] < 0) throw std::invalid_argument("partition: negative cap");
    for (int i : blocks[b]) {
      if (i < 0 || i >= dim || seen[static_cast<size_t>(i)]++)
        throw std::invalid_argument("partition: blocks must partition the ground set");
    }
  }
  for (int c : seen)
    if (c != 1) throw std::invalid_argument("partition: blocks must cover every coordinate");
  FeasibleRegion r;
  r.kind_ = Kind::Partition;
  r.dim_ = dim;
  r.blocks_ = std::move(blocks);
  r.caps_ = std::move(caps);
  return r;
}

namespace {

// Coordinates ordered by gradient value; between equal entries the larger
// allocation wins, last resort is the lower index. Deterministic, and
// invariant under positive rescaling of g.
struct GreedyOrder {
  int index;
  double g;
  double ub;
};

void sort_greedy(std::vector<GreedyOrder>& order) {
  std::sort(order.begin(), order.end(), [](const GreedyOrder& a, const GreedyOrder& b) {
    if (a.g != b.g) return a.g > b.g;
    if (a.ub != b.ub) return a.ub > b.ub;
    return a.index < b.index;
  });
}

}  // namespace

Vec FeasibleRegion::lmo(const Vec& g) const {
  check_dim(g, static_cast<size_t>(dim_), "lmo");
  // Per-coordinate allocation ceiling, including the shrink cap.
  auto coord_ub = [&](int i) -> double {
    double ub;
    switch (kind_) {
      case Kind::Box:
        ub = upper_[static_cast<size_t>(i)];
        break;
      case Kind::ScaledSimplex:
        ub = radius_;
        break;
      default:
        ub = 1.0;
        break;
    }
    if (cap_) ub = std::min(ub, (*cap_)[static_cast<size_t>(i)]);
    return ub;
  };

  Vec v(static_cast<size_t>(dim_), 0.0);
  if (kind_ == Kind::Box) {
    for (int i = 0; i < dim_; ++i) {
      const size_t si = static_cast<size_t>(i);
      const double lo = lower_[si];
      const double hi = std::max(lo, coord_ub(i));
      v[si] = g[si] > 0.0 ? hi : lo;
    }
    return v;
  }

  // The remaining variants are budgeted box polytopes; a rate-greedy fill is
  // exact for linear objectives over them.
  std::vector<GreedyOrder> order;
  order.reserve(static_cast<size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    const double ub = coord_ub(i);
    if (g[static_cast<size_t>(i)] > 0.0 && ub > 0.0)
      order.push_back({i, g[static_cast<size_t>(i)], ub});
  }
  sort_greedy(order);

  if (kind_ == Kind::ScaledSimplex || kind_ == Kind::Cardinality) {
    double budget = kind_ == Kind::ScaledSimplex ? radius_ : static_cast<double>(k_);
    for (const auto& o : order) {
      if (budget <= 0.0) break;
      const double take = std::min(o.ub, budget);
      v[static_cast<size_t>(o.index)] = take;
      budget -= take;
    }
    return v;
  }

  // Partition: independent budget per block.
  std::vector<int> block_of(static_cast<size_t>(dim_), 0);
  for (size_t b = 0; b < blocks_.size(); ++b)
    for (int i : blocks_[b]) block_of[static_cast<size_t>(i)] = static_cast<int>(b);
  std::vector<double> budget(caps_.size());
  for (size_t b = 0; b < caps_.size(); ++b) budget[b] = static_cast<double>(caps_[b]);
  for (const auto& o : order) {
    double& rem = budget[static_cast<size_t>(block_of[static_cast<size_t>(o.index)])];
    if (rem <= 0.0) continue;
    const double take = std::min(o.ub, rem);
    v[static_cast<size_t>(o.index)] = take;
    rem -= take;
  }
  return v;
}

FeasibleRegion FeasibleRegion::shrink(const Vec& x, const Vec& ubar) const {
  check_dim(x, static_cast<size_t>(dim_), "shrink");
  check_dim(ubar, static_cast<size_t>(dim_), "shrink");
  Vec cap(static_cast<size_t>(dim_));
  for (size_t i = 0; i < cap.size(); ++i) {
    if (x[i] > ubar[i] + 1e-12)
      throw InvariantViolation("shrink: point exceeds the coordinate cap (infeasible shrink)");
    cap[i] = std::max(0.0, ubar[i] - x[i]);
  }
  if (kind_ == Kind::Box) {
    for (size_t i = 0; i < cap.size(); ++i)
      if (lower_[i] > cap[i] + 1e-12)
        throw InvariantViolation("shrink: box lower bound exceeds the cap");
  }
  FeasibleRegion r = *this;
  if (r.cap_) {
    for (size_t i = 0; i < cap.size(); ++i) cap[i] = std::min(cap[i], (*r.cap_)[i]);
  }
  r.cap_ = std::move(cap);
  return r;
}

double FeasibleRegion::diameter() const {
  switch (kind_) {
    case Kind::Box:
      return nrm2(sub(upper_, lower_));
    case Kind::ScaledSimplex:
      return dim_ == 1 ? radius_ : radius_ * std::sqrt(2.0);
    case Kind::Cardinality:
      return std::sqrt(static_cast<double>(std::min(2 * k_, dim_)));
    case Kind::Partition: {
      double sum = 0.0;
      for (size_t b = 0; b < blocks_.size(); ++b) {
        const int nb = static_cast<int>(blocks_[b].size());
        const int cb = std::min(caps_[b], nb);
        sum += static_cast<double>(std::min(2 * cb, nb));
      }
      return std::sqrt(sum);
    }
  }
  return 0.0;
}

bool FeasibleRegion::contains(const Vec& x, double tol) const {
  if (x.size() != static_cast<size_t>(dim_)) return false;
  if (cap_) {
    for (size_t i = 0; i < x.size(); ++i)
      if (x[i] > (*cap_)[i] + tol) return false;
  }
  switch (kind_) {
    case Kind::Box: {
      for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
      return true;
    }
    case Kind::ScaledSimplex: {
      double sum = 0.0;
      for (double xi : x) {
        if (xi < -tol) return false;
        sum += xi;
      }
      return sum <= radius_ + tol;
    }
    case Kind::Cardinality: {
      double sum = 0.0;
      for (double xi : x) {
        if (xi < -tol || xi > 1.0 + tol) return false;
        sum += xi;
      }
      return sum <= static_cast<double>(k_) + tol;
    }
    case Kind::Partition: {
      for (double xi : x)
        if (xi < -tol || xi > 1.0 + tol) return false;
      for (size_t b = 0; b < blocks_.size(); ++b) {
        double sum = 0.0;
        for (int i : blocks_[b]) sum += x[static_cast<size_t>(i)];
        if (sum > static_cast<double>(caps_[b]) + tol) return false;
      }
      return true;
    }
  }
  return false;
}

bool FeasibleRegion::down_closed() const {
  if (kind_ != Kind::Box) return true;
  for (double lo : lower_)
    if (lo != 0.0) return false;
  return true;
}

Vec FeasibleRegion::upper_bounds() const {
  Vec ub(static_cast<size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    double u;
    switch (kind_) {
      case Kind::Box:
        u = upper_[static_cast<size_t>(i)];
        break;
      case Kind::ScaledSimplex:
        u = radius_;
        break;
      case Kind::Cardinality:
        u = k_ >= 1 ? 1.0 : 0.0;
        break;
      case Kind::Partition: {
        u = 0.0;
        for (size_t b = 0; b < blocks_.size(); ++b)
          for (int j : blocks_[b])
            if (j == i) u = caps_[b] >= 1 ? 1.0 : 0.0;
        break;
      }
    }
    if (cap_) u = std::min(u, (*cap_)[static_cast<size_t>(i)]);
    ub[static_cast<size_t>(i)] = u;
  }
  return ub;
}

Vec FeasibleRegion::lower_bounds() const {
  if (kind_ == Kind::Box) return lower_;
  return Vec(static_cast<size_t>(dim_), 0.0);
}

int FeasibleRegion::rank() const {
  switch (kind_) {
    case Kind::Cardinality:
      return k_;
    case Kind::Partition: {
      int r = 0;
      for (size_t b = 0; b < blocks_.size(); ++b)
        r += std::min(caps_[b], static_cast<int>(blocks_[b].size()));
      return r;
    }
    default:
      throw UnsupportedOperation("rank: only matroid polytopes have a rank");
  }
}

std::string FeasibleRegion::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Box:
      os << "box(d=" << dim_ << ")";
      break;
    case Kind::ScaledSimplex:
      os << "scaled_simplex(d=" << dim_ << ", r=" << radius_ << ")";
      break;
    case Kind::Cardinality:
      os << "cardinality(d=" << dim_ << ", k=" << k_ << ")";
      break;
    case Kind::Partition:
      os << "partition(d=" << dim_ << ", blocks=" << blocks_.size() << ")";
      break;
  }
  if (cap_) os << "+shrink";
  return os.str();
}

}  // namespace nocg
