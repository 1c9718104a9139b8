#include "schuriter/random.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "schuriter/error.hpp"

namespace schuriter {
namespace {

constexpr int kMaxDraws = 1000;

}  // namespace

CMatrix ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

CMatrix haar_unitary(Index n, Rng& rng) {
  if (n == 0) return CMatrix(0, 0);
  const CMatrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * identity(n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

CMatrix random_contraction(Index rows, Index cols, Rng& rng) {
  std::uniform_int_distribution<Index> pick(0, std::min(rows, cols));
  const Index unit = pick(rng);
  const Index size = std::max(rows + cols - unit, std::max(rows, cols));
  return haar_unitary(size, rng).topLeftCorner(rows, cols);
}

CMatrix random_cnu_contraction(Index dim, Index defect_rank, Rng& rng,
                               const Tolerance& tol) {
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    const CMatrix u = haar_unitary(dim + defect_rank, rng);
    CMatrix a = u.bottomRightCorner(dim, dim);
    if (is_cnu(Contraction(a, tol))) return a;
  }
  throw Error(ErrorCode::kNotCnu, "no completely non-unitary draw found");
}

DiscreteSystem random_conservative_system(Index io_dim, Index state_dim,
                                          Rng& rng, const Tolerance& tol) {
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    const CMatrix u = haar_unitary(io_dim + state_dim, rng);
    DiscreteSystem sys(BlockMatrix::split(u, io_dim, io_dim), tol);
    if (classify(sys).simple) return sys;
  }
  throw Error(ErrorCode::kNotSimpleConservative, "no simple draw found");
}

}  // namespace schuriter
