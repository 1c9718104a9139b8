#pragma once

// Hand-built systems and helpers shared by the test executables.

#include <cmath>

#include "schuriter/random.hpp"
#include "schuriter/systems.hpp"

namespace schuriter::testing {

inline CMatrix real_matrix(Index rows, Index cols,
                           std::initializer_list<double> values) {
  CMatrix m(rows, cols);
  auto it = values.begin();
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = *it++;
  }
  return m;
}

// [[0,0,1],[1,0,0],[0,1,0]] split 1+2, transfer lambda^2.
inline DiscreteSystem square_chain() {
  const CMatrix t = real_matrix(3, 3, {0, 0, 1, 1, 0, 0, 0, 1, 0});
  return DiscreteSystem(BlockMatrix::split(t, 1, 1));
}

// One state, transfer (lambda + a) / (1 + a lambda).
inline DiscreteSystem blaschke_one(double a = 0.4) {
  const double s = std::sqrt(1.0 - a * a);
  const CMatrix t = real_matrix(2, 2, {a, s, s, -a});
  return DiscreteSystem(BlockMatrix::split(t, 1, 1));
}

inline CMatrix nilpotent2() { return real_matrix(2, 2, {0, 1, 0, 0}); }

inline double dist(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return spectral_norm(a - b);
}

}  // namespace schuriter::testing
