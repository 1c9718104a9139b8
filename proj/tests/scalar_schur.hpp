#pragma once

// Classical Schur recursion for scalar functions, run on truncated Taylor
// coefficients:  f_{n+1} = (f_n - g_n) / (z (1 - conj(g_n) f_n)).
// Independent of the operator machinery in the library.

#include <cmath>
#include <vector>

#include "schuriter/systems.hpp"

namespace schuriter::testing {

// c_0 = D, c_k = C A^{k-1} B for a system with one input and one output.
inline std::vector<Complex> taylor(const DiscreteSystem& sys, int count) {
  std::vector<Complex> c{sys.d()(0, 0)};
  CMatrix v = sys.b();
  for (int k = 1; k < count; ++k) {
    c.push_back(sys.state_dim() == 0 ? Complex(0.0) : (sys.c() * v)(0, 0));
    if (sys.state_dim() > 0) v = sys.a() * v;
  }
  return c;
}

struct ScalarSchur {
  std::vector<Complex> gammas;
  bool terminated = false;
};

inline ScalarSchur scalar_schur(std::vector<Complex> c, int n_max,
                                double unit_tol) {
  ScalarSchur out;
  for (int n = 0; n <= n_max && !c.empty(); ++n) {
    const Complex g = c[0];
    out.gammas.push_back(g);
    if (std::abs(std::abs(g) - 1.0) <= unit_tol) {
      out.terminated = true;
      break;
    }
    // num = (f - g) / z, den = 1 - conj(g) f, both as power series.
    const std::size_t len = c.size() - 1;
    std::vector<Complex> num(c.begin() + 1, c.end());
    std::vector<Complex> den(len);
    for (std::size_t k = 0; k < len; ++k) {
      den[k] = (k == 0 ? 1.0 : 0.0) - std::conj(g) * c[k];
    }
    std::vector<Complex> q(len);
    for (std::size_t k = 0; k < len; ++k) {
      Complex acc = num[k];
      for (std::size_t j = 1; j <= k; ++j) acc -= den[j] * q[k - j];
      q[k] = acc / den[0];
    }
    c = std::move(q);
  }
  return out;
}

}  // namespace schuriter::testing
