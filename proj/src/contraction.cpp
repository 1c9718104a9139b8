#include "schuriter/contraction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "schuriter/error.hpp"

namespace schuriter {
namespace {

CMatrix power(const CMatrix& a, int n) {
  CMatrix p = identity(a.rows());
  for (int i = 0; i < n; ++i) p = a * p;
  return p;
}

void require_nonnegative(int n, int m) {
  if (n < 0 || m < 0) {
    throw Error(ErrorCode::kShapeMismatch, "indices must be nonnegative");
  }
}

}  // namespace

CMatrix defect_operator(const CMatrix& t, const Tolerance& tol) {
  return psd_sqrt(identity(t.cols()) - t.adjoint() * t, tol);
}

CMatrix defect_operator_adjoint(const CMatrix& t, const Tolerance& tol) {
  return psd_sqrt(identity(t.rows()) - t * t.adjoint(), tol);
}

DefectBases defect_bases(const CMatrix& t, const Tolerance& tol) {
  if (!is_contraction(t, tol)) {
    throw Error(ErrorCode::kNotContraction,
                "norm " + std::to_string(spectral_norm(t)) + " exceeds 1");
  }
  DefectBases out;
  out.d = defect_operator(t, tol);
  out.d_star = defect_operator_adjoint(t, tol);
  out.space = range_basis(out.d, tol);
  out.space_star = range_basis(out.d_star, tol);
  out.lambda = out.space.basis().adjoint() * out.d * out.space.basis();
  out.lambda_star =
      out.space_star.basis().adjoint() * out.d_star * out.space_star.basis();
  return out;
}

DefectBases defect_bases(const CMatrix& t, Subspace space, Subspace space_star,
                         const Tolerance& tol) {
  if (space.ambient_dim() != t.cols() || space_star.ambient_dim() != t.rows()) {
    throw Error(ErrorCode::kAmbientMismatch, "defect bases do not fit");
  }
  DefectBases out;
  out.d = defect_operator(t, tol);
  out.d_star = defect_operator_adjoint(t, tol);
  out.space = std::move(space);
  out.space_star = std::move(space_star);
  out.lambda = out.space.basis().adjoint() * out.d * out.space.basis();
  out.lambda_star =
      out.space_star.basis().adjoint() * out.d_star * out.space_star.basis();
  return out;
}

Contraction::Contraction(CMatrix a, const Tolerance& tol)
    : a_(std::move(a)), tol_(tol) {
  tol_.validate();
  if (a_.rows() != a_.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "contraction must be square");
  }
  defects_ = defect_bases(a_, tol_);
}

DefectPair defect(const Contraction& a) {
  return {a.d_a(), a.d_a_star(), a.defect_space(), a.defect_space_star()};
}

bool is_cnu(const Contraction& a) {
  const Index d = a.dim();
  if (d == 0) return true;
  CMatrix family(d, 2 * d * d);
  CMatrix left = a.d_a();
  CMatrix right = a.d_a_star();
  for (Index j = 0; j < d; ++j) {
    family.middleCols(2 * j * d, d) = left;
    family.middleCols((2 * j + 1) * d, d) = right;
    left = a.a().adjoint() * left;
    right = a.a() * right;
  }
  return numerical_rank(family, a.tol()) == d;
}

CanonicalSplit canonical_split(const Contraction& a) {
  CanonicalSplit out;
  const int d = static_cast<int>(a.dim());
  out.unitary_part = h_subspace(a, d, d);
  out.cnu_part = orthogonal_complement(out.unitary_part, a.tol());
  return out;
}

Subspace h_subspace(const Contraction& a, int n, int m) {
  require_nonnegative(n, m);
  const Tolerance& tol = a.tol();
  const Subspace left = kernel_basis(defect_operator(power(a.a(), n), tol), tol);
  const Subspace right =
      kernel_basis(defect_operator(power(a.a().adjoint(), m), tol), tol);
  return subspace_intersect(left, right, tol);
}

CMatrix compress(const Contraction& a, int n, int m) {
  const CMatrix q = h_subspace(a, n, m).basis();
  return q.adjoint() * a.a() * q;
}

CMatrix partial_product(const Contraction& a, int n, int m) {
  const CMatrix q = h_subspace(a, n, m).basis();
  const CMatrix p_next = projector(h_subspace(a, n + 1, m));
  return q.adjoint() * a.a() * p_next * q;
}

DefectProfile defect_profile(const Contraction& a, int n_max) {
  if (n_max < 0) {
    throw Error(ErrorCode::kShapeMismatch, "n_max must be nonnegative");
  }
  if (!is_cnu(a)) {
    throw Error(ErrorCode::kNotCnu, "defect profile needs a c.n.u. contraction");
  }
  DefectProfile out;
  for (int n = 0; n <= n_max; ++n) {
    const CMatrix a0n = compress(a, 0, n);
    const CMatrix an0 = compress(a, n, 0);
    out.delta.push_back(
        numerical_rank(defect_operator(a0n, a.tol()), a.tol()));
    out.delta_star.push_back(
        numerical_rank(defect_operator_adjoint(an0, a.tol()), a.tol()));
  }
  return out;
}

bool is_c00(const Contraction& a) {
  if (!is_cnu(a)) {
    throw Error(ErrorCode::kNotCnu, "class test needs a c.n.u. contraction");
  }
  if (a.dim() == 0) return true;
  Eigen::ComplexEigenSolver<CMatrix> es(a.a(), false);
  return es.eigenvalues().cwiseAbs().maxCoeff() < 1.0 - a.tol().rank_rel;
}

CMatrix char_function_value(const CMatrix& a, const CMatrix& dom_basis,
                            const CMatrix& codom_basis, Complex lambda,
                            const Tolerance& tol) {
  if (std::abs(lambda) >= 1.0) {
    throw Error(ErrorCode::kOutsideDisk, "|lambda| must be below 1");
  }
  const Index d = a.rows();
  if (d == 0) return zeros(codom_basis.cols(), dom_basis.cols());
  const CMatrix resolvent =
      (identity(d) - lambda * a.adjoint()).partialPivLu().solve(
          defect_operator(a, tol));
  const CMatrix full =
      -a + lambda * defect_operator_adjoint(a, tol) * resolvent;
  return codom_basis.adjoint() * full * dom_basis;
}

}  // namespace schuriter
