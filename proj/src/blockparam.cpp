#include "schuriter/blockparam.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "schuriter/error.hpp"

namespace schuriter {
namespace {

// lhs^{-1} rhs for an invertible square lhs; empty-safe.
CMatrix left_solve(const CMatrix& lhs, const CMatrix& rhs) {
  if (lhs.rows() == 0) return zeros(0, rhs.cols());
  if (rhs.cols() == 0) return zeros(lhs.cols(), 0);
  return lhs.partialPivLu().solve(rhs);
}

// lhs rhs^{-1} for an invertible square rhs.
CMatrix right_solve(const CMatrix& lhs, const CMatrix& rhs) {
  return left_solve(rhs.adjoint(), lhs.adjoint()).adjoint();
}

void require_shape(const CMatrix& m, Index rows, Index cols,
                   const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + " has shape " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()) + ", expected " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void require_basis(const Subspace& s, Index ambient, Index dim,
                   const char* what) {
  if (s.ambient_dim() != ambient || s.dim() != dim) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(what) + " basis does not match its operator");
  }
}

void require_contraction(const BlockMatrix& t, const Tolerance& tol) {
  if (!is_contraction(t.assembled(), tol)) {
    throw Error(ErrorCode::kNotContraction, "block matrix is not contractive");
  }
}

double max_abs_residual(const BlockMatrix& a, const BlockMatrix& b) {
  return spectral_norm(a.assembled() - b.assembled());
}

BlockMatrix adjoint_block(const BlockMatrix& t) {
  return BlockMatrix(t.d().adjoint(), t.b().adjoint(), t.c().adjoint(),
                     t.a().adjoint());
}

}  // namespace

BlockMatrix::BlockMatrix(CMatrix d, CMatrix c, CMatrix b, CMatrix a)
    : d_(std::move(d)), c_(std::move(c)), b_(std::move(b)), a_(std::move(a)) {
  if (c_.rows() != d_.rows() || b_.cols() != d_.cols() ||
      a_.rows() != b_.rows() || a_.cols() != c_.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "blocks do not fit together");
  }
}

BlockMatrix BlockMatrix::split(const CMatrix& t, Index n, Index m) {
  if (n < 0 || m < 0 || n > t.rows() || m > t.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "split sizes exceed the matrix");
  }
  const Index k = t.rows() - n;
  const Index h = t.cols() - m;
  return BlockMatrix(t.topLeftCorner(n, m), t.topRightCorner(n, h),
                     t.bottomLeftCorner(k, m), t.bottomRightCorner(k, h));
}

CMatrix BlockMatrix::assembled() const {
  CMatrix t(n() + k(), m() + h());
  t.topLeftCorner(n(), m()) = d_;
  t.topRightCorner(n(), h()) = c_;
  t.bottomLeftCorner(k(), m()) = b_;
  t.bottomRightCorner(k(), h()) = a_;
  return t;
}

KmxParams make_kmx(CMatrix a, CMatrix k, CMatrix m, CMatrix x,
                   const Tolerance& tol) {
  KmxParams p;
  const DefectBases da = defect_bases(a, tol);
  p.d_a = da.space;
  p.d_a_star = da.space_star;
  p.d_m = defect_bases(m, tol).space;
  p.d_k_star = defect_bases(k, tol).space_star;
  p.a = std::move(a);
  p.k = std::move(k);
  p.m = std::move(m);
  p.x = std::move(x);
  return p;
}

FglParams make_fgl(CMatrix d, CMatrix f, CMatrix g, CMatrix l,
                   const Tolerance& tol) {
  FglParams p;
  const DefectBases dd = defect_bases(d, tol);
  p.d_d = dd.space;
  p.d_d_star = dd.space_star;
  p.d_g = defect_bases(g, tol).space;
  p.d_f_star = defect_bases(f, tol).space_star;
  p.d = std::move(d);
  p.f = std::move(f);
  p.g = std::move(g);
  p.l = std::move(l);
  return p;
}

BlockMatrix assemble_kmx(const KmxParams& p, const Tolerance& tol) {
  const Index h = p.a.cols();
  const Index k = p.a.rows();
  const Index n = p.k.rows();
  const Index m = p.m.cols();
  require_basis(p.d_a, h, p.k.cols(), "D_A");
  require_basis(p.d_a_star, k, p.m.rows(), "D_A*");
  require_basis(p.d_m, m, p.x.cols(), "D_M");
  require_basis(p.d_k_star, n, p.x.rows(), "D_K*");
  if (!is_contraction(p.k, tol) || !is_contraction(p.m, tol) ||
      !is_contraction(p.x, tol) || !is_contraction(p.a, tol)) {
    throw Error(ErrorCode::kNotContraction, "parameters must be contractive");
  }
  const CMatrix& ua = p.d_a.basis();
  const CMatrix& ua_star = p.d_a_star.basis();
  const CMatrix a_rel = ua.adjoint() * p.a.adjoint() * ua_star;
  const CMatrix d = -p.k * a_rel * p.m + defect_operator_adjoint(p.k, tol) *
                                             p.d_k_star.basis() * p.x *
                                             p.d_m.basis().adjoint() *
                                             defect_operator(p.m, tol);
  const CMatrix c = p.k * ua.adjoint() * defect_operator(p.a, tol);
  const CMatrix b = defect_operator_adjoint(p.a, tol) * ua_star * p.m;
  return BlockMatrix(d, c, b, p.a);
}

BlockMatrix assemble_fgl(const FglParams& p, const Tolerance& tol) {
  const Index m = p.d.cols();
  const Index n = p.d.rows();
  const Index h = p.g.cols();
  const Index k = p.f.rows();
  require_basis(p.d_d, m, p.f.cols(), "D_D");
  require_basis(p.d_d_star, n, p.g.rows(), "D_D*");
  require_basis(p.d_g, h, p.l.cols(), "D_G");
  require_basis(p.d_f_star, k, p.l.rows(), "D_F*");
  if (!is_contraction(p.d, tol) || !is_contraction(p.f, tol) ||
      !is_contraction(p.g, tol) || !is_contraction(p.l, tol)) {
    throw Error(ErrorCode::kNotContraction, "parameters must be contractive");
  }
  const CMatrix& vd = p.d_d.basis();
  const CMatrix& vd_star = p.d_d_star.basis();
  const CMatrix d_rel = vd.adjoint() * p.d.adjoint() * vd_star;
  const CMatrix c = defect_operator_adjoint(p.d, tol) * vd_star * p.g;
  const CMatrix b = p.f * vd.adjoint() * defect_operator(p.d, tol);
  const CMatrix a = -p.f * d_rel * p.g + defect_operator_adjoint(p.f, tol) *
                                             p.d_f_star.basis() * p.l *
                                             p.d_g.basis().adjoint() *
                                             defect_operator(p.g, tol);
  return BlockMatrix(p.d, c, b, a);
}

KmxParams decompose_kmx(const BlockMatrix& t, const Tolerance& tol) {
  require_contraction(t, tol);
  const DefectBases da = defect_bases(t.a(), tol);
  const CMatrix& ua = da.space.basis();
  const CMatrix& ua_star = da.space_star.basis();
  KmxParams p;
  p.a = t.a();
  p.d_a = da.space;
  p.d_a_star = da.space_star;
  p.k = right_solve(t.c() * ua, da.lambda);
  p.m = left_solve(da.lambda_star, ua_star.adjoint() * t.b());
  const DefectBases dm = defect_bases(p.m, tol);
  const DefectBases dk = defect_bases(p.k, tol);
  p.d_m = dm.space;
  p.d_k_star = dk.space_star;
  const CMatrix a_rel = ua.adjoint() * t.a().adjoint() * ua_star;
  const CMatrix r = t.d() + p.k * a_rel * p.m;
  p.x = right_solve(
      left_solve(dk.lambda_star,
                 dk.space_star.basis().adjoint() * r * dm.space.basis()),
      dm.lambda);
  if (max_abs_residual(assemble_kmx(p, tol), t) > tol.eq_abs) {
    throw Error(ErrorCode::kNotContraction,
                "block matrix does not factor through the defect spaces");
  }
  return p;
}

FglParams decompose_fgl(const BlockMatrix& t, const Tolerance& tol) {
  require_contraction(t, tol);
  const DefectBases dd = defect_bases(t.d(), tol);
  const CMatrix& vd = dd.space.basis();
  const CMatrix& vd_star = dd.space_star.basis();
  FglParams p;
  p.d = t.d();
  p.d_d = dd.space;
  p.d_d_star = dd.space_star;
  p.f = right_solve(t.b() * vd, dd.lambda);
  p.g = left_solve(dd.lambda_star, vd_star.adjoint() * t.c());
  const DefectBases dg = defect_bases(p.g, tol);
  const DefectBases df = defect_bases(p.f, tol);
  p.d_g = dg.space;
  p.d_f_star = df.space_star;
  const CMatrix d_rel = vd.adjoint() * t.d().adjoint() * vd_star;
  const CMatrix r = t.a() + p.f * d_rel * p.g;
  p.l = right_solve(
      left_solve(df.lambda_star,
                 df.space_star.basis().adjoint() * r * dg.space.basis()),
      dg.lambda);
  if (max_abs_residual(assemble_fgl(p, tol), t) > tol.eq_abs) {
    throw Error(ErrorCode::kNotContraction,
                "block matrix does not factor through the defect spaces");
  }
  return p;
}

IsoCriteria iso_criteria(const BlockMatrix& t, const Tolerance& tol) {
  const KmxParams p = decompose_kmx(t, tol);
  // Products of defect operators scale like the square root of the Gram
  // defect, so they are compared against sqrt(eq_abs).
  const double cut = std::sqrt(tol.eq_abs);
  const CMatrix da = p.d_a.basis().adjoint() * defect_operator(p.a, tol);
  const CMatrix da_star =
      p.d_a_star.basis().adjoint() * defect_operator_adjoint(p.a, tol);
  const CMatrix dm = p.d_m.basis().adjoint() * defect_operator(p.m, tol);
  const CMatrix dk_star =
      p.d_k_star.basis().adjoint() * defect_operator_adjoint(p.k, tol);

  IsoCriteria out;
  out.isometric =
      spectral_norm(defect_operator(p.k, tol) * da) <= cut &&
      spectral_norm(defect_operator(p.x, tol) * dm) <= cut;
  out.coisometric =
      spectral_norm(defect_operator_adjoint(p.m, tol) * da_star) <= cut &&
      spectral_norm(defect_operator_adjoint(p.x, tol) * dk_star) <= cut;
  out.unitary = out.isometric && out.coisometric;

  const CMatrix full = t.assembled();
  out.direct_isometric =
      spectral_norm(full.adjoint() * full - identity(full.cols())) <=
      tol.eq_abs;
  out.direct_coisometric =
      spectral_norm(full * full.adjoint() - identity(full.rows())) <=
      tol.eq_abs;
  out.direct_unitary = out.direct_isometric && out.direct_coisometric;
  return out;
}

double UnitaryLink::max_residual() const {
  return std::max({defect_d_vs_range_m_star, defect_d_star_vs_range_k,
                   f_star_vs_m_star, g_vs_k, l_vs_a, gf_vs_km});
}

UnitaryLink unitary_link(const BlockMatrix& t, LinkOrientation orientation,
                         const Tolerance& tol) {
  if (unitarity_residual(t.assembled()) > tol.eq_abs) {
    throw Error(ErrorCode::kNotUnitary, "block matrix is not unitary");
  }
  const BlockMatrix s =
      orientation == LinkOrientation::kDirect ? t : adjoint_block(t);
  UnitaryLink out;
  out.kmx = decompose_kmx(s, tol);
  out.fgl = decompose_fgl(s, tol);
  const KmxParams& k = out.kmx;
  const FglParams& f = out.fgl;
  const CMatrix& ua = k.d_a.basis();
  const CMatrix& ua_star = k.d_a_star.basis();

  out.defect_d_vs_range_m_star =
      subspace_distance(f.d_d, range_basis(k.m.adjoint(), tol));
  out.defect_d_star_vs_range_k =
      subspace_distance(f.d_d_star, range_basis(k.k, tol));
  out.f_star_vs_m_star = spectral_norm(f.d_d.basis() * f.f.adjoint() -
                                       k.m.adjoint() * ua_star.adjoint());
  out.g_vs_k =
      spectral_norm(f.d_d_star.basis() * f.g - k.k * ua.adjoint());
  const CMatrix l_amb = f.d_f_star.basis() * f.l * f.d_g.basis().adjoint();
  out.l_vs_a =
      spectral_norm(l_amb - s.a() * (identity(s.h()) - ua * ua.adjoint()));
  if (s.h() == s.k()) {
    out.gf_vs_km = spectral_norm(
        f.d_d_star.basis() * f.g * f.f * f.d_d.basis().adjoint() -
        k.k * ua.adjoint() * ua_star * k.m);
  }
  return out;
}

BlockMatrix moebius_map(const CMatrix& d, const BlockMatrix& q,
                        const Tolerance& tol) {
  const DefectBases db = defect_bases(d, tol);
  const Index delta = db.space.dim();
  const Index delta_star = db.space_star.dim();
  require_shape(q.d(), delta_star, delta, "upper-left block of Q");
  if (spectral_norm(q.d()) > tol.eq_abs) {
    throw Error(ErrorCode::kShapeMismatch,
                "upper-left block of Q must vanish");
  }
  const CMatrix& vd = db.space.basis();
  const CMatrix& vd_star = db.space_star.basis();
  const CMatrix d_rel = vd.adjoint() * d.adjoint() * vd_star;
  const CMatrix c = db.d_star * vd_star * q.c();
  const CMatrix b = q.b() * vd.adjoint() * db.d;
  const CMatrix a = q.a() - q.b() * d_rel * q.c();
  return BlockMatrix(d, c, b, a);
}

BlockMatrix moebius_inverse(const BlockMatrix& t, const Tolerance& tol) {
  require_contraction(t, tol);
  const DefectBases db = defect_bases(t.d(), tol);
  const CMatrix& vd = db.space.basis();
  const CMatrix& vd_star = db.space_star.basis();
  const CMatrix f = right_solve(t.b() * vd, db.lambda);
  const CMatrix g = left_solve(db.lambda_star, vd_star.adjoint() * t.c());
  const CMatrix d_rel = vd.adjoint() * t.d().adjoint() * vd_star;
  return BlockMatrix(zeros(vd_star.cols(), vd.cols()), g, f,
                     t.a() + f * d_rel * g);
}

CMatrix shmulyan_transform(const CMatrix& t, const CMatrix& z,
                           const Tolerance& tol) {
  return shmulyan_transform(t, defect_bases(t, tol), z, tol);
}

CMatrix shmulyan_transform(const CMatrix& t, const DefectBases& db,
                           const CMatrix& z, const Tolerance& tol) {
  const CMatrix& v = db.space.basis();
  const CMatrix& w = db.space_star.basis();
  require_shape(z, w.cols(), v.cols(), "Z");
  if (v.cols() == 0 || w.cols() == 0) return t;
  const CMatrix t_rel = v.adjoint() * t.adjoint() * w;
  const CMatrix pencil = identity(v.cols()) + t_rel * z;
  Eigen::JacobiSVD<CMatrix> svd(pencil);
  if (svd.singularValues().minCoeff() <= tol.eq_abs) {
    throw Error(ErrorCode::kSingularPencil, "I + T^H Z is singular");
  }
  return t + db.d_star * w * right_solve(z, pencil) * v.adjoint() * db.d;
}

CMatrix shmulyan_parameter(const CMatrix& t, const CMatrix& q,
                           const Tolerance& tol) {
  return shmulyan_parameter(t, defect_bases(t, tol), q);
}

CMatrix shmulyan_parameter(const CMatrix& t, const DefectBases& db,
                           const CMatrix& q) {
  const CMatrix& v = db.space.basis();
  const CMatrix& w = db.space_star.basis();
  require_shape(q, t.rows(), t.cols(), "Q");
  if (v.cols() == 0 || w.cols() == 0) return zeros(w.cols(), v.cols());
  const CMatrix y =
      w.adjoint() * (identity(t.rows()) - q * t.adjoint()) * w;
  const CMatrix e = w.adjoint() * (q - t) * v;
  return db.lambda_star * left_solve(y, right_solve(e, db.lambda));
}

double shmulyan_defect_residual(const CMatrix& t, const CMatrix& z,
                                const Tolerance& tol) {
  const CMatrix q = shmulyan_transform(t, z, tol);
  const DefectBases db = defect_bases(t, tol);
  const CMatrix& v = db.space.basis();
  const CMatrix& w = db.space_star.basis();
  const CMatrix t_rel = v.adjoint() * t.adjoint() * w;
  const CMatrix in_map =
      left_solve(identity(v.cols()) + t_rel * z, v.adjoint() * db.d);
  const CMatrix lhs_in = identity(t.cols()) - q.adjoint() * q;
  const CMatrix rhs_in = in_map.adjoint() *
                         defect_operator(z, tol) * defect_operator(z, tol) *
                         in_map;
  const CMatrix out_map =
      right_solve(db.d_star * w, identity(w.cols()) + z * t_rel);
  const CMatrix lhs_out = identity(t.rows()) - q * q.adjoint();
  const CMatrix rhs_out = out_map * defect_operator_adjoint(z, tol) *
                          defect_operator_adjoint(z, tol) *
                          out_map.adjoint();
  return std::max(spectral_norm(lhs_in - rhs_in),
                  spectral_norm(lhs_out - rhs_out));
}

}  // namespace schuriter
