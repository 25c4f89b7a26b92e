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

#ifndef NOCG_LMO_HPP
#define NOCG_LMO_HPP

#include <optional>
#include <string>
#include <vector>

#include "nocg/vec.hpp"

namespace nocg {

// Compact convex feasible regions with exact linear maximization oracles.
// All oracles are sorting-based, O(d log d); no LP solver is involved.
// Tie-breaking is deterministic: between coordinates with equal gradient
// entries the one admitting the larger allocation wins, and remaining ties
// go to the lowest index. Zero gradient entries rest at the lower bound.
class FeasibleRegion {
 public:
  enum class Kind { Box, ScaledSimplex, Cardinality, Partition };

  static FeasibleRegion box(Vec lower, Vec upper);
  // { x >= 0, sum x <= radius }, the down-closed scaled simplex.
  static FeasibleRegion scaled_simplex(int dim, double radius);
  // { x in [0,1]^d, sum x <= k }, the cardinality matroid polytope.
  static FeasibleRegion cardinality(int dim, int k);
  // Blocks partition {0..d-1}; per-block coordinate sums are capped.
  static FeasibleRegion partition(int dim, std::vector<std::vector<int>> blocks,
                                  std::vector<int> caps);

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  bool is_shrunk() const { return cap_.has_value(); }

  // argmax_{v in region} v'g, a vertex of the (possibly shrunk) region.
  Vec lmo(const Vec& g) const;

  // Region with the extra constraint v <= ubar - x. Requires x <= ubar.
  FeasibleRegion shrink(const Vec& x, const Vec& ubar) const;

  // Euclidean diameter; an analytic constant per variant, never estimated.
  // Boxes use the corner distance, the scaled simplex r*sqrt(2) (r when
  // d = 1), the cardinality polytope sqrt(2k) when 2k <= d and sqrt(d)
  // otherwise, and partition polytopes sum the per-block cardinality terms.
  double diameter() const;

  bool contains(const Vec& x, double tol) const;

  // True when the region contains, with any point y, every 0 <= x <= y.
  bool down_closed() const;

  // Coordinatewise bounds of the region, used as the default ubar.
  Vec upper_bounds() const;
  Vec lower_bounds() const;

  // Matroid rank for the cardinality/partition variants.
  int rank() const;

  std::string describe() const;

 private:
  FeasibleRegion() = default;

  Kind kind_ = Kind::Box;
  int dim_ = 0;
  Vec lower_, upper_;                     // Box
  double radius_ = 0.0;                   // ScaledSimplex
  int k_ = 0;                             // Cardinality
  std::vector<std::vector<int>> blocks_;  // Partition
  std::vector<int> caps_;
  std::optional<Vec> cap_;  // extra v <= cap constraint when shrunk
};

// Free-function spellings of the region operations.
inline Vec lmo(const FeasibleRegion& region, const Vec& g) { return region.lmo(g); }
inline FeasibleRegion shrink(const FeasibleRegion& region, const Vec& x, const Vec& ubar) {
  return region.shrink(x, ubar);
}
inline double diameter(const FeasibleRegion& region) { return region.diameter(); }
inline bool contains(const FeasibleRegion& region, const Vec& x, double tol) {
  return region.contains(x, tol);
}

}  // namespace nocg

#endif  // NOCG_LMO_HPP
