/*
 * Copyright 2026 The ovrlogit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "ovrlogit/solvers.hpp"

// Reference computations that share no code with the library.
namespace ovrlogit::testing {

// Mean log loss of a linear model written directly from the definition, in
// long double.
inline double oracle_loss(const Matrix& x, const Vector& y, const Vector& w, double b) {
  long double total = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    long double z = b;
    for (Eigen::Index j = 0; j < x.cols(); ++j) z += static_cast<long double>(x(i, j)) * w[j];
    // log(1 + e^z) without overflow
    const long double softplus = std::max(z, 0.0L) + std::log1p(std::exp(-std::abs(z)));
    total += y[i] * (softplus - z) + (1 - y[i]) * softplus;
  }
  return static_cast<double>(total / x.rows());
}

// Central differences of oracle_loss with step h in every parameter.
inline Gradient finite_difference_gradient(const Matrix& x, const Vector& y, const Vector& w, double b, double h) {
  Gradient g{Vector(w.size()), 0.0};
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    Vector up = w, down = w;
    up[j] += h;
    down[j] -= h;
    g.weights[j] = (oracle_loss(x, y, up, b) - oracle_loss(x, y, down, b)) / (2 * h);
  }
  g.bias = (oracle_loss(x, y, w, b + h) - oracle_loss(x, y, w, b - h)) / (2 * h);
  return g;
}

inline double gradient_relative_error(const Gradient& a, const Gradient& b) {
  Vector va(a.weights.size() + 1), vb(b.weights.size() + 1);
  va << a.weights, a.bias;
  vb << b.weights, b.bias;
  return (va - vb).norm() / std::max({va.norm(), vb.norm(), 1e-300});
}

// Two features on the lattice {-1, 0, 1}^2 with 20 samples per cell and a
// fixed number of positives per cell. The grid oracle works with the 9
// distinct cells and their counts.
struct LatticeToy {
  BinaryDataset data;
  std::vector<std::array<double, 2>> cells;
  std::vector<int> positives;
  int per_cell;
};

inline LatticeToy lattice_toy() {
  const int per_cell = 20;
  const int positives_by_cell[9] = {3, 5, 9, 8, 11, 13, 12, 16, 17};
  std::vector<std::array<double, 2>> cells;
  std::vector<int> positives;
  Matrix x(9 * per_cell, 2);
  Vector y(9 * per_cell);
  Eigen::Index row = 0;
  int c = 0;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b, ++c) {
      cells.push_back({static_cast<double>(a), static_cast<double>(b)});
      positives.push_back(positives_by_cell[c]);
      for (int s = 0; s < per_cell; ++s, ++row) {
        x(row, 0) = a;
        x(row, 1) = b;
        y[row] = s < positives_by_cell[c] ? 1.0 : 0.0;
      }
    }
  }
  return LatticeToy{BinaryDataset(std::move(x), std::move(y)), cells, positives, per_cell};
}

inline double lattice_objective(const LatticeToy& toy, double w0, double w1, double b, double lambda) {
  double total = 0.0;
  for (std::size_t c = 0; c < toy.cells.size(); ++c) {
    const double z = w0 * toy.cells[c][0] + w1 * toy.cells[c][1] + b;
    const double pos_loss = std::log1p(std::exp(-z));
    const double neg_loss = z + std::log1p(std::exp(-z));
    total += toy.positives[c] * pos_loss + (toy.per_cell - toy.positives[c]) * neg_loss;
  }
  const double n = static_cast<double>(toy.cells.size()) * toy.per_cell;
  return total / n + lambda * (std::abs(w0) + std::abs(w1));
}

// Minimum of the objective over (w0, w1, b) in [-3, 3]^3 at step 0.01. For
// each (w0, w1) the b-minimum over the lattice is found by integer ternary
// search, which is exact because the objective is convex in b.
inline double grid_minimum(const LatticeToy& toy, double lambda) {
  auto at = [](int i) { return -3.0 + 0.01 * i; };
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 600; ++i) {
    for (int j = 0; j <= 600; ++j) {
      int lo = 0, hi = 600;
      auto f = [&](int k) { return lattice_objective(toy, at(i), at(j), at(k), lambda); };
      while (hi - lo > 2) {
        const int m1 = lo + (hi - lo) / 3;
        const int m2 = hi - (hi - lo) / 3;
        if (f(m1) < f(m2)) hi = m2 - 1; else lo = m1 + 1;
      }
      for (int k = lo; k <= hi; ++k) best = std::min(best, f(k));
    }
  }
  return best;
}

}  // namespace ovrlogit::testing
