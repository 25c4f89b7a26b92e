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
#include "nocg/lmo.hpp"
#include "nocg/rng.hpp"

using namespace nocg;

namespace {

constexpr uint64_t kSeed = 61002;

Vec random_direction(RngStream& rng, int d) {
  Vec g(static_cast<size_t>(d));
  for (double& gi : g) gi = rng.normal();
  return g;
}

// Feasible point samplers per variant, used by the optimality property.
Vec random_feasible(const FeasibleRegion& region, RngStream& rng) {
  const int d = region.dim();
  Vec x(static_cast<size_t>(d));
  switch (region.kind()) {
    case FeasibleRegion::Kind::Box: {
      const Vec lo = region.lower_bounds();
      const Vec hi = region.upper_bounds();
      for (int i = 0; i < d; ++i) {
        const size_t si = static_cast<size_t>(i);
        x[si] = lo[si] + rng.uniform01() * (hi[si] - lo[si]);
      }
      return x;
    }
    default: {
      // Start from a box draw and rescale into the budget(s).
      const Vec hi = region.upper_bounds();
      for (int i = 0; i < d; ++i) x[static_cast<size_t>(i)] =
          rng.uniform01() * hi[static_cast<size_t>(i)];
      for (int pass = 0; pass < 4 && !region.contains(x, 1e-12); ++pass)
        for (double& xi : x) xi *= 0.5;
      return x;
    }
  }
}

}  // namespace

TEST_CASE("lmo coordinate rules") {
  const FeasibleRegion box = FeasibleRegion::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  CHECK(box.lmo({1.0, -2.0, 0.0}) == Vec{1.0, 0.0, 0.0});

  const FeasibleRegion card = FeasibleRegion::cardinality(3, 2);
  CHECK(card.lmo({3.0, 1.0, 2.0}) == Vec{1.0, 0.0, 1.0});

  const FeasibleRegion simplex = FeasibleRegion::scaled_simplex(3, 1.0);
  CHECK(simplex.lmo({0.5, 2.0, -1.0}) == Vec{0.0, 1.0, 0.0});
}

TEST_CASE("shrunk oracles") {
  SUBCASE("box cap") {
    const FeasibleRegion box = FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0});
    const FeasibleRegion shrunk = box.shrink({0.6, 0.2}, {1.0, 1.0});
    const Vec v = shrunk.lmo({1.0, 1.0});
    CHECK(v[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-15));
  }
  SUBCASE("degenerate cap pins the oracle at zero") {
    const FeasibleRegion box = FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0});
    const FeasibleRegion shrunk = box.shrink({1.0, 1.0}, {1.0, 1.0});
    CHECK(shrunk.lmo({3.0, 5.0}) == Vec{0.0, 0.0});
  }
  SUBCASE("capped cardinality polytope prefers the looser coordinate on ties") {
    const FeasibleRegion card = FeasibleRegion::cardinality(2, 1);
    const FeasibleRegion shrunk = card.shrink({0.5, 0.0}, {1.0, 1.0});
    CHECK(shrunk.lmo({1.0, 1.0}) == Vec{0.0, 1.0});
  }
  SUBCASE("infeasible shrink is rejected") {
    const FeasibleRegion box = FeasibleRegion::box({0.0}, {1.0});
    CHECK_THROWS_AS(box.shrink({0.7}, {0.5}), InvariantViolation);
  }
}

TEST_CASE("diameters are analytic constants") {
  CHECK(FeasibleRegion::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}).diameter() ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(FeasibleRegion::scaled_simplex(4, 1.0).diameter() ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(FeasibleRegion::cardinality(4, 1).diameter() ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(FeasibleRegion::cardinality(4, 3).diameter() ==
        doctest::Approx(2.0).epsilon(1e-14));  // 2k > d, so sqrt(d)
  CHECK(FeasibleRegion::partition(4, {{0, 1}, {2, 3}}, {1, 2}).diameter() ==
        doctest::Approx(std::sqrt(2.0 + 2.0)).epsilon(1e-14));
}

TEST_CASE("membership with tolerance") {
  const FeasibleRegion box = FeasibleRegion::box({0.0, 0.0}, {1.0, 1.0});
  CHECK(box.contains({0.5, 1.0}, 0.0));
  CHECK(box.contains({1.0 + 1e-10, 0.0}, 1e-9));
  CHECK_FALSE(box.contains({1.1, 0.0}, 1e-9));

  const FeasibleRegion card = FeasibleRegion::cardinality(2, 1);
  CHECK_FALSE(card.contains({0.6, 0.6}, 1e-9));
  CHECK(card.contains({0.6, 0.4}, 1e-9));
}

TEST_CASE("oracle optimality over random directions and feasible points") {
  std::vector<FeasibleRegion> regions;
  regions.push_back(FeasibleRegion::box({-1.0, 0.0, 0.5}, {1.0, 2.0, 0.5}));
  regions.push_back(FeasibleRegion::scaled_simplex(4, 2.5));
  regions.push_back(FeasibleRegion::cardinality(5, 2));
  regions.push_back(FeasibleRegion::partition(5, {{0, 2}, {1, 3, 4}}, {1, 2}));
  regions.push_back(FeasibleRegion::cardinality(4, 2).shrink({0.3, 0.0, 0.9, 0.1},
                                                             {1.0, 1.0, 1.0, 1.0}));

  RngStream rng = derive_stream(kSeed, phase::kTest, 0, 0);
  for (const FeasibleRegion& region : regions) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec g = random_direction(rng, region.dim());
      const Vec v = region.lmo(g);
      CHECK(region.contains(v, 1e-12));
      const double lmo_value = dot(v, g);
      for (int inner = 0; inner < 5; ++inner) {
        const Vec x = random_feasible(region, rng);
        CHECK(lmo_value >= dot(x, g) - 1e-12);
      }
      // argmax is invariant under positive rescaling of g
      CHECK(region.lmo(scaled(g, 3.7)) == v);
    }
  }
}

TEST_CASE("shrunk oracle output plus the base point stays below the cap") {
  RngStream rng = derive_stream(kSeed, phase::kTest, 1, 0);
  const FeasibleRegion card = FeasibleRegion::cardinality(6, 3);
  const Vec ubar(6, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vec x = random_feasible(card, rng);
    const FeasibleRegion shrunk = card.shrink(x, ubar);
    const Vec v = shrunk.lmo(random_direction(rng, 6));
    for (size_t i = 0; i < x.size(); ++i) CHECK(x[i] + v[i] <= ubar[i] + 1e-12);
  }
}

TEST_CASE("region validation") {
  CHECK_THROWS_AS(FeasibleRegion::box({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleRegion::cardinality(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleRegion::scaled_simplex(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleRegion::partition(3, {{0, 1}}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleRegion::box({0.0}, {1.0}).lmo({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("down-closedness and bounds") {
  CHECK(FeasibleRegion::box({0.0, 0.0}, {1.0, 2.0}).down_closed());
  CHECK_FALSE(FeasibleRegion::box({0.5, 0.0}, {1.0, 2.0}).down_closed());
  CHECK(FeasibleRegion::cardinality(3, 2).down_closed());
  CHECK(FeasibleRegion::scaled_simplex(3, 1.0).upper_bounds() == Vec{1.0, 1.0, 1.0});
  CHECK(FeasibleRegion::cardinality(3, 2).rank() == 2);
  CHECK(FeasibleRegion::partition(4, {{0, 1, 2}, {3}}, {2, 5}).rank() == 3);
}
