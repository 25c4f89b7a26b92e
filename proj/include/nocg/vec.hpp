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

#ifndef NOCG_VEC_HPP
#define NOCG_VEC_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nocg {

using Vec = std::vector<double>;

// Dense row-major matrix, only used where a full Hessian is materialized
// (tests and small diagnostic paths, d <= 32).
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline void check_dim(const Vec& v, size_t d, const char* what) {
  if (v.size() != d) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

inline double dot(const Vec& x, const Vec& y) {
  check_dim(y, x.size(), "dot");
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double nrm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec add(const Vec& x, const Vec& y) {
  check_dim(y, x.size(), "add");
  Vec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

inline Vec sub(const Vec& x, const Vec& y) {
  check_dim(y, x.size(), "sub");
  Vec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

inline Vec scaled(const Vec& x, double c) {
  Vec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = c * x[i];
  return r;
}

// y += c * x
inline void axpy(double c, const Vec& x, Vec& y) {
  check_dim(y, x.size(), "axpy");
  for (size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

// x(a) = a * x_cur + (1 - a) * x_prev
inline Vec convex_combination(const Vec& x_prev, const Vec& x_cur, double a) {
  check_dim(x_cur, x_prev.size(), "convex_combination");
  Vec r(x_prev.size());
  for (size_t i = 0; i < x_prev.size(); ++i) r[i] = a * x_cur[i] + (1.0 - a) * x_prev[i];
  return r;
}

inline Vec matvec(const Mat& m, const Vec& x) {
  check_dim(x, static_cast<size_t>(m.cols), "matvec");
  Vec r(static_cast<size_t>(m.rows), 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    r[static_cast<size_t>(i)] = s;
  }
  return r;
}

inline bool all_finite(const Vec& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace nocg

#endif  // NOCG_VEC_HPP
