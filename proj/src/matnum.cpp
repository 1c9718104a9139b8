#include "schuriter/matnum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "schuriter/error.hpp"

namespace schuriter {
namespace {

using Svd = Eigen::JacobiSVD<CMatrix>;

Svd full_svd(const CMatrix& m) {
  return Svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

Index rank_from_singular_values(const Eigen::VectorXd& s,
                                const Tolerance& tol) {
  if (s.size() == 0) return 0;
  const double smax = s(0);
  if (smax <= tol.eq_abs) return 0;
  Index r = 0;
  while (r < s.size() && s(r) > tol.rank_rel * smax) ++r;
  return r;
}

// Rotates each column so that its largest entry is real and positive.  This
// only makes printed bases reproducible; orthonormality is unaffected.
void normalize_phases(CMatrix& q) {
  for (Index j = 0; j < q.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < q.rows(); ++i) {
      const double a = std::abs(q(i, j));
      if (a > best_abs + 1e-12) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs > 0.0) q.col(j) *= std::conj(q(best, j)) / best_abs;
  }
}

}  // namespace

void Tolerance::validate() const {
  if (!(std::isfinite(rank_rel) && rank_rel > 0.0 && rank_rel < 1.0 &&
        std::isfinite(eq_abs) && eq_abs > 0.0)) {
    throw Error(ErrorCode::kInvalidTolerance,
                "tolerances must be finite and positive");
  }
}

Subspace::Subspace(Index ambient_dim) : basis_(ambient_dim, 0) {}

Subspace Subspace::from_orthonormal(CMatrix basis, const Tolerance& tol) {
  if (basis.cols() > basis.rows() ||
      (basis.cols() > 0 &&
       spectral_norm(basis.adjoint() * basis - identity(basis.cols())) >
           tol.eq_abs)) {
    throw Error(ErrorCode::kShapeMismatch, "basis columns are not orthonormal");
  }
  Subspace s;
  s.basis_ = std::move(basis);
  return s;
}

Subspace Subspace::full(Index ambient_dim) {
  Subspace s;
  s.basis_ = identity(ambient_dim);
  return s;
}

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

CMatrix zeros(Index rows, Index cols) { return CMatrix::Zero(rows, cols); }

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Svd svd(m);
  return svd.singularValues()(0);
}

CMatrix psd_sqrt(const CMatrix& h, const Tolerance& tol) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "psd_sqrt needs a square matrix");
  }
  if (h.size() == 0) return CMatrix(0, 0);
  if (spectral_norm(h - h.adjoint()) > tol.eq_abs) {
    throw Error(ErrorCode::kNotHermitian, "matrix is not Hermitian");
  }
  const CMatrix hs = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hs);
  Eigen::VectorXd lam = es.eigenvalues();
  if (lam(0) < -tol.eq_abs) {
    throw Error(ErrorCode::kIndefiniteBeyondTolerance,
                "eigenvalue " + std::to_string(lam(0)) + " below -eq_abs");
  }
  const double cut = tol.rank_rel * std::max(1.0, lam(lam.size() - 1));
  for (Index i = 0; i < lam.size(); ++i) {
    lam(i) = lam(i) <= cut ? 0.0 : std::sqrt(lam(i));
  }
  const CMatrix& v = es.eigenvectors();
  CMatrix s = v * lam.cast<Complex>().asDiagonal() * v.adjoint();
  return (s + s.adjoint()) / 2.0;
}

CMatrix pinv(const CMatrix& m, const Tolerance& tol) {
  if (m.size() == 0) return zeros(m.cols(), m.rows());
  Svd svd = full_svd(m);
  const Index r = rank_from_singular_values(svd.singularValues(), tol);
  CMatrix out = zeros(m.cols(), m.rows());
  for (Index i = 0; i < r; ++i) {
    out += svd.matrixV().col(i) * (1.0 / svd.singularValues()(i)) *
           svd.matrixU().col(i).adjoint();
  }
  return out;
}

Index numerical_rank(const CMatrix& m, const Tolerance& tol) {
  if (m.size() == 0) return 0;
  return rank_from_singular_values(Svd(m).singularValues(), tol);
}

Subspace kernel_basis(const CMatrix& m, const Tolerance& tol) {
  if (m.cols() == 0) return Subspace(0);
  if (m.rows() == 0) return Subspace::full(m.cols());
  Svd svd = full_svd(m);
  const Index r = rank_from_singular_values(svd.singularValues(), tol);
  if (r == 0) return Subspace::full(m.cols());
  CMatrix q = svd.matrixV().rightCols(m.cols() - r);
  normalize_phases(q);
  return Subspace::from_orthonormal(std::move(q), tol);
}

Subspace range_basis(const CMatrix& m, const Tolerance& tol) {
  if (m.rows() == 0) return Subspace(0);
  if (m.cols() == 0) return Subspace(m.rows());
  Svd svd = full_svd(m);
  const Index r = rank_from_singular_values(svd.singularValues(), tol);
  CMatrix q = svd.matrixU().leftCols(r);
  normalize_phases(q);
  return Subspace::from_orthonormal(std::move(q), tol);
}

Subspace subspace_intersect(const Subspace& u, const Subspace& v,
                            const Tolerance& tol) {
  if (u.ambient_dim() != v.ambient_dim()) {
    throw Error(ErrorCode::kAmbientMismatch,
                "subspaces live in different spaces");
  }
  const Index d = u.ambient_dim();
  if (u.is_trivial() || v.is_trivial()) return Subspace(d);
  if (u.dim() == d) return v;
  if (v.dim() == d) return u;
  CMatrix stacked(2 * d, d);
  stacked.topRows(d) = identity(d) - projector(u);
  stacked.bottomRows(d) = identity(d) - projector(v);
  return kernel_basis(stacked, tol);
}

Subspace orthogonal_complement(const Subspace& u, const Tolerance& tol) {
  if (u.is_trivial()) return Subspace::full(u.ambient_dim());
  return kernel_basis(u.basis().adjoint(), tol);
}

CMatrix projector(const Subspace& u) {
  return u.basis() * u.basis().adjoint();
}

double subspace_distance(const Subspace& u, const Subspace& v) {
  if (u.ambient_dim() != v.ambient_dim()) {
    throw Error(ErrorCode::kAmbientMismatch,
                "subspaces live in different spaces");
  }
  return spectral_norm(projector(u) - projector(v));
}

bool is_isometry(const CMatrix& m, const Tolerance& tol) {
  if (m.cols() > m.rows()) return false;
  if (m.cols() == 0) return true;
  const Eigen::VectorXd s = Svd(m).singularValues();
  return (s.array() - 1.0).abs().maxCoeff() <= tol.eq_abs;
}

bool is_coisometry(const CMatrix& m, const Tolerance& tol) {
  return is_isometry(m.adjoint(), tol);
}

bool is_unitary(const CMatrix& m, const Tolerance& tol) {
  return m.rows() == m.cols() && is_isometry(m, tol);
}

bool is_contraction(const CMatrix& m, const Tolerance& tol) {
  return spectral_norm(m) <= 1.0 + tol.eq_abs;
}

double unitarity_residual(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const Index n = m.rows();
  return std::max(spectral_norm(m.adjoint() * m - identity(n)),
                  spectral_norm(m * m.adjoint() - identity(n)));
}

}  // namespace schuriter
