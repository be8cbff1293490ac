// Copyright 2026 The dse Authors.
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

#ifndef DSE_TESTS_ORACLES_HPP_
#define DSE_TESTS_ORACLES_HPP_

// Reference computations that share no code with the library.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dse::testing {

using Matrix = std::vector<std::vector<double>>;

// Inverse by Gauss-Jordan elimination with partial pivoting.
inline Matrix gauss_jordan_inverse(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// log|det A| by Gaussian elimination with partial pivoting.
inline double log_abs_det(Matrix a) {
  const std::size_t n = a.size();
  double acc = 0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    acc += std::log(std::abs(a[col][col]));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  return acc;
}

struct OraclePosterior {
  double mean = 0;
  double variance = 0;
};

// Squared-exponential GP with constant mean equal to the sample mean and
// `diag` added to the kernel diagonal.
inline OraclePosterior gp_oracle(const std::vector<std::vector<double>>& x,
                                 const std::vector<double>& y, const std::vector<double>& query,
                                 double signal_var, double length_scale, double diag) {
  const std::size_t n = x.size();
  auto kern = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double d2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return signal_var * std::exp(-d2 / (2 * length_scale * length_scale));
  };
  Matrix k(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k[i][j] = kern(x[i], x[j]) + (i == j ? diag : 0.0);
  const Matrix kinv = gauss_jordan_inverse(k);
  double m = 0;
  for (double v : y) m += v;
  m /= static_cast<double>(n);
  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i) ks[i] = kern(x[i], query);
  OraclePosterior p{m, signal_var};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      p.mean += ks[i] * kinv[i][j] * (y[j] - m);
      p.variance -= ks[i] * kinv[i][j] * ks[j];
    }
  return p;
}

// Standard normal density, and the distribution by composite Simpson
// integration of the density from 0.
inline double oracle_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); }
inline double oracle_cdf(double z) {
  const int n = 4000;
  const double h = std::abs(z) / n;
  double s = oracle_pdf(0) + oracle_pdf(std::abs(z));
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * oracle_pdf(i * h);
  const double half = s * h / 3;
  return z >= 0 ? 0.5 + half : 0.5 - half;
}

}  // namespace dse::testing

#endif  // DSE_TESTS_ORACLES_HPP_
