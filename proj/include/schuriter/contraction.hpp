#pragma once

#include <vector>

#include "schuriter/matnum.hpp"

namespace schuriter {

/// D_T = (I - T^H T)^{1/2} for a rectangular contraction T.
CMatrix defect_operator(const CMatrix& t, const Tolerance& tol = {});
/// D_{T*} = (I - T T^H)^{1/2}.
CMatrix defect_operator_adjoint(const CMatrix& t, const Tolerance& tol = {});

/// Orthonormal bases of the defect spaces of a (possibly rectangular)
/// contraction together with the invertible restrictions of the defect
/// operators to them.
struct DefectBases {
  CMatrix d;         // D_T, cols x cols
  CMatrix d_star;    // D_{T*}, rows x rows
  Subspace space;    // closure of ran D_T
  Subspace space_star;
  CMatrix lambda;       // V^H D_T V
  CMatrix lambda_star;  // W^H D_{T*} W
};

// Throws kNotContraction if ||t|| > 1 + eq_abs.
DefectBases defect_bases(const CMatrix& t, const Tolerance& tol = {});
// Uses the given orthonormal bases of the two defect spaces.
DefectBases defect_bases(const CMatrix& t, Subspace space, Subspace space_star,
                         const Tolerance& tol = {});

/// Square contraction on C^d.  Defect operators and spaces are computed once
/// at construction.
class Contraction {
 public:
  // Throws kShapeMismatch for non-square input, kNotContraction if
  // ||a|| > 1 + eq_abs.
  explicit Contraction(CMatrix a, const Tolerance& tol = {});

  const CMatrix& a() const { return a_; }
  Index dim() const { return a_.rows(); }
  const Tolerance& tol() const { return tol_; }

  const CMatrix& d_a() const { return defects_.d; }
  const CMatrix& d_a_star() const { return defects_.d_star; }
  const Subspace& defect_space() const { return defects_.space; }
  const Subspace& defect_space_star() const { return defects_.space_star; }
  const DefectBases& defects() const { return defects_; }

 private:
  CMatrix a_;
  Tolerance tol_;
  DefectBases defects_;
};

struct DefectPair {
  CMatrix d_a;
  CMatrix d_a_star;
  Subspace space;
  Subspace space_star;
};

DefectPair defect(const Contraction& a);

bool is_cnu(const Contraction& a);

struct CanonicalSplit {
  Subspace cnu_part;      // H0
  Subspace unitary_part;  // H1, reducing, A restricted to it is unitary
};

CanonicalSplit canonical_split(const Contraction& a);

/// H(n,m) = ker D_{A^n} intersected with ker D_{A*^m}; H(0,0) is the whole
/// space.
Subspace h_subspace(const Contraction& a, int n, int m);

/// A(n,m) = P_{n,m} A restricted to H(n,m), in the basis of h_subspace(n,m).
CMatrix compress(const Contraction& a, int n, int m);

/// The product A(n,m) P_{n+1,m} on H(n,m), same basis as compress.
CMatrix partial_product(const Contraction& a, int n, int m);

struct DefectProfile {
  std::vector<Index> delta;       // dim of the defect space of A(0,n)
  std::vector<Index> delta_star;  // dim of the defect space of A(n,0)*
};

// Throws kNotCnu.
DefectProfile defect_profile(const Contraction& a, int n_max);

/// Spectral radius below 1 - rank_rel.  Throws kNotCnu.
bool is_c00(const Contraction& a);

/// Characteristic function -A + lambda D_{A*} (I - lambda A^H)^{-1} D_A
/// between the given bases of the two defect spaces.
CMatrix char_function_value(const CMatrix& a, const CMatrix& dom_basis,
                            const CMatrix& codom_basis, Complex lambda,
                            const Tolerance& tol = {});

}  // namespace schuriter
