#pragma once

#include "schuriter/contraction.hpp"
#include "schuriter/matnum.hpp"

namespace schuriter {

/// T = [D C; B A] mapping M (+) H into N (+) K, with
/// D: M -> N, C: H -> N, B: M -> K, A: H -> K.
class BlockMatrix {
 public:
  // Throws kShapeMismatch if the four blocks do not fit together.
  BlockMatrix(CMatrix d, CMatrix c, CMatrix b, CMatrix a);

  // Splits t into blocks with n output rows and m input columns in the
  // upper-left corner.
  static BlockMatrix split(const CMatrix& t, Index n, Index m);

  const CMatrix& d() const { return d_; }
  const CMatrix& c() const { return c_; }
  const CMatrix& b() const { return b_; }
  const CMatrix& a() const { return a_; }

  Index m() const { return d_.cols(); }
  Index n() const { return d_.rows(); }
  Index h() const { return a_.cols(); }
  Index k() const { return a_.rows(); }

  CMatrix assembled() const;

 private:
  CMatrix d_, c_, b_, a_;
};

/// D = -K A^H M + D_{K*} X D_M, C = K D_A, B = D_{A*} M.
/// K acts on the defect space of A, M lands in the defect space of A*, and
/// X maps the defect space of M into that of K*.  Each operator is stored in
/// the coordinates of the orthonormal bases kept alongside it.
struct KmxParams {
  CMatrix a;
  CMatrix k;  // n x dim D_A
  CMatrix m;  // dim D_{A*} x m
  CMatrix x;  // dim D_{K*} x dim D_M
  Subspace d_a;       // in H
  Subspace d_a_star;  // in K
  Subspace d_m;       // in M
  Subspace d_k_star;  // in N
};

/// A = -F D^H G + D_{F*} L D_G, B = F D_D, C = D_{D*} G.
struct FglParams {
  CMatrix d;
  CMatrix f;  // k x dim D_D
  CMatrix g;  // dim D_{D*} x h
  CMatrix l;  // dim D_{F*} x dim D_G
  Subspace d_d;       // in M
  Subspace d_d_star;  // in N
  Subspace d_g;       // in H
  Subspace d_f_star;  // in K
};

// Fills the bases from range_basis of the defect operators.
KmxParams make_kmx(CMatrix a, CMatrix k, CMatrix m, CMatrix x,
                   const Tolerance& tol = {});
FglParams make_fgl(CMatrix d, CMatrix f, CMatrix g, CMatrix l,
                   const Tolerance& tol = {});

BlockMatrix assemble_kmx(const KmxParams& p, const Tolerance& tol = {});
BlockMatrix assemble_fgl(const FglParams& p, const Tolerance& tol = {});

// Throw kNotContraction if the block matrix is not a contraction.
KmxParams decompose_kmx(const BlockMatrix& t, const Tolerance& tol = {});
FglParams decompose_fgl(const BlockMatrix& t, const Tolerance& tol = {});

struct IsoCriteria {
  // From products of defect operators of the parameters.
  bool isometric = false;
  bool coisometric = false;
  bool unitary = false;
  // From T^H T = I and T T^H = I.
  bool direct_isometric = false;
  bool direct_coisometric = false;
  bool direct_unitary = false;

  bool agree() const {
    return isometric == direct_isometric &&
           coisometric == direct_coisometric && unitary == direct_unitary;
  }
};

IsoCriteria iso_criteria(const BlockMatrix& t, const Tolerance& tol = {});

enum class LinkOrientation {
  kDirect,   // L is A restricted to ker D_A
  kAdjoint,  // applied to T^H, so L is A^H restricted to ker D_{A*}
};

/// Cross-check of the two parametrizations of a unitary block matrix.
struct UnitaryLink {
  KmxParams kmx;
  FglParams fgl;
  double defect_d_vs_range_m_star = 0.0;
  double defect_d_star_vs_range_k = 0.0;
  double f_star_vs_m_star = 0.0;
  double g_vs_k = 0.0;
  double l_vs_a = 0.0;
  double gf_vs_km = 0.0;  // only when h == k, else 0

  double max_residual() const;
};

// Throws kNotUnitary.
UnitaryLink unitary_link(const BlockMatrix& t,
                         LinkOrientation orientation = LinkOrientation::kDirect,
                         const Tolerance& tol = {});

/// T = [D, D_{D*} G; F D_D, S - F D^H G] for Q = [0 G; F S] mapping
/// D_D (+) H into D_{D*} (+) K, with Q in the coordinates of
/// defect_bases(d).
BlockMatrix moebius_map(const CMatrix& d, const BlockMatrix& q,
                        const Tolerance& tol = {});

/// Inverse of moebius_map: returns Q for a contractive T.
BlockMatrix moebius_inverse(const BlockMatrix& t, const Tolerance& tol = {});

/// Q = T + D_{T*} Z (I + T^H Z)^{-1} D_T, with Z mapping the defect space of
/// T into that of T^H in the coordinates of defect_bases(t).
/// Throws kSingularPencil.
CMatrix shmulyan_transform(const CMatrix& t, const CMatrix& z,
                           const Tolerance& tol = {});
// Same, with the defect bases of t supplied by the caller.
CMatrix shmulyan_transform(const CMatrix& t, const DefectBases& db,
                           const CMatrix& z, const Tolerance& tol = {});

/// Recovers Z from Q = shmulyan_transform(T, Z).
CMatrix shmulyan_parameter(const CMatrix& t, const CMatrix& q,
                           const Tolerance& tol = {});
CMatrix shmulyan_parameter(const CMatrix& t, const DefectBases& db,
                           const CMatrix& q);

/// Largest deviation in the identities
///   |D_Q f|^2 = |D_Z (I + T^H Z)^{-1} D_T f|^2,
///   |D_{Q*} g|^2 = |D_{Z*} (I + Z T^H)^{-1} D_{T*} g|^2.
double shmulyan_defect_residual(const CMatrix& t, const CMatrix& z,
                                const Tolerance& tol = {});

}  // namespace schuriter
