#pragma once

#include <complex>

#include <Eigen/Core>

namespace schuriter {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// rank_rel: singular values <= rank_rel * sigma_max count as zero.
/// eq_abs: absolute tolerance for equality tests.
struct Tolerance {
  double rank_rel = 1e-10;
  double eq_abs = 1e-9;

  // Throws kInvalidTolerance unless both values are finite and positive and
  // rank_rel < 1.
  void validate() const;
};

/// Subspace of C^ambient stored as a matrix with orthonormal columns.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(Index ambient_dim);  // the zero subspace

  // Throws kShapeMismatch if the columns are not orthonormal within eq_abs.
  static Subspace from_orthonormal(CMatrix basis, const Tolerance& tol = {});
  static Subspace full(Index ambient_dim);

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  bool is_trivial() const { return basis_.cols() == 0; }
  const CMatrix& basis() const { return basis_; }

 private:
  CMatrix basis_ = CMatrix(0, 0);
};

CMatrix identity(Index n);
CMatrix zeros(Index rows, Index cols);

// Largest singular value, 0 for empty matrices.
double spectral_norm(const CMatrix& m);

/// Principal square root of a Hermitian PSD matrix.  Eigenvalues below
/// rank_rel * max(1, lambda_max) are set to zero before taking roots, which
/// keeps the rank of the root equal to the numerical rank of h.
CMatrix psd_sqrt(const CMatrix& h, const Tolerance& tol = {});

CMatrix pinv(const CMatrix& m, const Tolerance& tol = {});

Index numerical_rank(const CMatrix& m, const Tolerance& tol = {});
Subspace kernel_basis(const CMatrix& m, const Tolerance& tol = {});
Subspace range_basis(const CMatrix& m, const Tolerance& tol = {});

// Throws kAmbientMismatch when ambient dimensions differ.
Subspace subspace_intersect(const Subspace& u, const Subspace& v,
                            const Tolerance& tol = {});
Subspace orthogonal_complement(const Subspace& u, const Tolerance& tol = {});

CMatrix projector(const Subspace& u);

// Spectral norm of P_u - P_v, i.e. the sine of the largest principal angle
// when dimensions agree and 1 otherwise.
double subspace_distance(const Subspace& u, const Subspace& v);

bool is_isometry(const CMatrix& m, const Tolerance& tol = {});
bool is_coisometry(const CMatrix& m, const Tolerance& tol = {});
bool is_unitary(const CMatrix& m, const Tolerance& tol = {});
bool is_contraction(const CMatrix& m, const Tolerance& tol = {});

// max(|M^H M - I|_2, |M M^H - I|_2) for square M, +inf otherwise.
double unitarity_residual(const CMatrix& m);

}  // namespace schuriter
