#include "schuriter/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "schuriter/error.hpp"

namespace schuriter {
namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

// [B, AB, ..., A^{h-1}B]
CMatrix krylov(const CMatrix& a, const CMatrix& b) {
  const Index h = a.rows();
  CMatrix out(h, h * b.cols());
  CMatrix block = b;
  for (Index j = 0; j < h; ++j) {
    out.middleCols(j * b.cols(), b.cols()) = block;
    block = a * block;
  }
  return out;
}

CMatrix resolvent_times(const CMatrix& a, Complex lambda, const CMatrix& rhs) {
  if (a.rows() == 0) return zeros(0, rhs.cols());
  return (identity(a.rows()) - lambda * a).partialPivLu().solve(rhs);
}

CMatrix power(const CMatrix& a, Index n) {
  CMatrix p = identity(a.rows());
  for (Index i = 0; i < n; ++i) p = a * p;
  return p;
}

bool is_conservative(const DiscreteSystem& sys) {
  return sys.input_dim() == sys.output_dim() &&
         unitarity_residual(sys.block().assembled()) <= sys.tol().eq_abs;
}

}  // namespace

DiscreteSystem::DiscreteSystem(BlockMatrix block, const Tolerance& tol)
    : block_(std::move(block)), tol_(tol) {
  tol_.validate();
  if (block_.h() != block_.k()) {
    throw Error(ErrorCode::kShapeMismatch, "state operator must be square");
  }
}

DiscreteSystem::DiscreteSystem(CMatrix d, CMatrix c, CMatrix b, CMatrix a,
                               const Tolerance& tol)
    : DiscreteSystem(BlockMatrix(std::move(d), std::move(c), std::move(b),
                                 std::move(a)),
                     tol) {}

DiskFunction::DiskFunction(Index in_dim, Index out_dim, Evaluator eval)
    : in_dim_(in_dim), out_dim_(out_dim), eval_(std::move(eval)) {}

CMatrix DiskFunction::operator()(Complex lambda) const {
  if (!(std::abs(lambda) < 1.0)) {
    throw Error(ErrorCode::kOutsideDisk, "|lambda| must be below 1");
  }
  CMatrix v = eval_(lambda);
  if (v.rows() != out_dim_ || v.cols() != in_dim_) {
    throw Error(ErrorCode::kDimMismatch, "evaluator returned a wrong shape");
  }
  return v;
}

std::vector<Complex> sample_grid(const std::vector<double>& radii,
                                 int angles) {
  std::vector<Complex> grid{Complex(0.0, 0.0)};
  for (double r : radii) {
    if (!(r >= 0.0 && r < 1.0)) {
      throw Error(ErrorCode::kOutsideDisk, "grid radius must lie in [0, 1)");
    }
    for (int j = 0; j < angles; ++j) {
      grid.push_back(std::polar(r, 2.0 * std::numbers::pi * j / angles));
    }
  }
  return grid;
}

double grid_distance(const DiskFunction& f, const DiskFunction& g,
                     const std::vector<Complex>& grid) {
  if (f.in_dim() != g.in_dim() || f.out_dim() != g.out_dim()) {
    throw Error(ErrorCode::kDimMismatch, "functions act between other spaces");
  }
  double worst = 0.0;
  for (Complex z : grid) worst = std::max(worst, spectral_norm(f(z) - g(z)));
  return worst;
}

CMatrix transfer(const DiscreteSystem& sys, Complex lambda) {
  if (!(std::abs(lambda) < 1.0)) {
    throw Error(ErrorCode::kOutsideDisk, "|lambda| must be below 1");
  }
  if (sys.state_dim() == 0) return sys.d();
  return sys.d() + lambda * sys.c() * resolvent_times(sys.a(), lambda, sys.b());
}

DiskFunction transfer_function(const DiscreteSystem& sys) {
  return DiskFunction(sys.input_dim(), sys.output_dim(),
                      [sys](Complex z) { return transfer(sys, z); });
}

Trajectory simulate(const DiscreteSystem& sys,
                    const std::vector<CVector>& inputs, const CVector& h0) {
  if (h0.size() != sys.state_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "initial state has wrong size");
  }
  Trajectory out;
  out.states.push_back(h0);
  for (const CVector& xi : inputs) {
    if (xi.size() != sys.input_dim()) {
      throw Error(ErrorCode::kShapeMismatch, "input has wrong size");
    }
    const CVector& h = out.states.back();
    out.outputs.push_back(sys.c() * h + sys.d() * xi);
    out.states.push_back(sys.a() * h + sys.b() * xi);
  }
  return out;
}

Subspace controllable_subspace(const DiscreteSystem& sys) {
  return range_basis(krylov(sys.a(), sys.b()), sys.tol());
}

Subspace observable_subspace(const DiscreteSystem& sys) {
  return range_basis(krylov(sys.a().adjoint(), sys.c().adjoint()), sys.tol());
}

Classification classify(const DiscreteSystem& sys) {
  const Tolerance& tol = sys.tol();
  const CMatrix t = sys.block().assembled();
  const Index h = sys.state_dim();
  Classification out;
  out.passive = is_contraction(t, tol);
  out.isometric = is_isometry(t, tol);
  out.coisometric = is_coisometry(t, tol);
  out.conservative = out.isometric && out.coisometric;

  const Subspace hc = controllable_subspace(sys);
  const Subspace ho = observable_subspace(sys);
  out.controllable = hc.dim() == h;
  out.observable = ho.dim() == h;
  CMatrix both(h, hc.dim() + ho.dim());
  both << hc.basis(), ho.basis();
  out.simple = numerical_rank(both, tol) == h;
  out.minimal = out.controllable && out.observable;

  if (out.conservative && h > 0) {
    const double cut = std::sqrt(tol.eq_abs);
    const Subspace unreachable = kernel_basis(
        defect_operator(power(sys.a().adjoint(), h), tol), tol);
    const Subspace unobservable =
        kernel_basis(defect_operator(power(sys.a(), h), tol), tol);
    out.subspace_cross_check =
        subspace_distance(unreachable, orthogonal_complement(hc, tol)) <=
            cut &&
        subspace_distance(unobservable, orthogonal_complement(ho, tol)) <= cut;
  }
  return out;
}

DiscreteSystem char_colligation(const Contraction& a) {
  const CMatrix& v = a.defect_space().basis();
  const CMatrix& w = a.defect_space_star().basis();
  return DiscreteSystem(-w.adjoint() * a.a() * v, w.adjoint() * a.d_a_star(),
                        a.d_a() * v, a.a().adjoint(), a.tol());
}

DiskFunction char_function(const Contraction& a) {
  return transfer_function(char_colligation(a));
}

PurePart pure_part(const CMatrix& theta0, const Tolerance& tol) {
  const DefectBases db = defect_bases(theta0, tol);
  PurePart out;
  out.in_defect = db.space;
  out.out_defect = db.space_star;
  out.in_kernel = kernel_basis(db.d, tol);
  out.out_kernel = kernel_basis(db.d_star, tol);
  const CMatrix& v = out.in_defect.basis();
  const CMatrix& w = out.out_defect.basis();
  const CMatrix& vk = out.in_kernel.basis();
  const CMatrix& wk = out.out_kernel.basis();
  out.pure = w.adjoint() * theta0 * v;
  out.unitary = wk.adjoint() * theta0 * vk;
  out.off_diagonal = std::max(spectral_norm(wk.adjoint() * theta0 * v),
                              spectral_norm(w.adjoint() * theta0 * vk));
  return out;
}

DiskFunction pure_part_function(const DiskFunction& theta,
                                const Tolerance& tol) {
  const PurePart p = pure_part(theta(Complex(0.0, 0.0)), tol);
  const CMatrix v = p.in_defect.basis();
  const CMatrix w = p.out_defect.basis();
  return DiskFunction(v.cols(), w.cols(), [theta, v, w](Complex z) {
    return CMatrix(w.adjoint() * theta(z) * v);
  });
}

std::pair<Subspace, Subspace> wandering_subspaces(const DiscreteSystem& sys) {
  if (!is_conservative(sys)) {
    throw Error(ErrorCode::kNotSimpleConservative, "system is not conservative");
  }
  const Tolerance& tol = sys.tol();
  auto wandering = [&tol](const Subspace& invariant, const CMatrix& a) {
    if (invariant.is_trivial()) return invariant;
    const Subspace image = range_basis(a * invariant.basis(), tol);
    return subspace_intersect(invariant, orthogonal_complement(image, tol),
                              tol);
  };
  const Subspace unobservable =
      orthogonal_complement(observable_subspace(sys), tol);
  const Subspace unreachable =
      orthogonal_complement(controllable_subspace(sys), tol);
  return {wandering(unobservable, sys.a()),
          wandering(unreachable, sys.a().adjoint())};
}

DefectFunctions defect_functions(const DiscreteSystem& sys) {
  if (!is_conservative(sys) || !classify(sys).simple) {
    throw Error(ErrorCode::kNotSimpleConservative,
                "system is not simple conservative");
  }
  auto [omega, omega_star] = wandering_subspaces(sys);
  const CMatrix q = omega.basis();
  const CMatrix q_star = omega_star.basis();
  const CMatrix a = sys.a();
  const CMatrix b = sys.b();
  const CMatrix c = sys.c();
  DiskFunction phi(sys.input_dim(), q.cols(), [q, a, b](Complex z) {
    return CMatrix(q.adjoint() * resolvent_times(a, z, b));
  });
  DiskFunction psi(q_star.cols(), sys.output_dim(),
                   [q_star, a, c](Complex z) {
                     return CMatrix(c * resolvent_times(a, z, q_star));
                   });
  return {omega, omega_star, phi, psi};
}

double similarity_residual(const DiscreteSystem& s1, const DiscreteSystem& s2,
                           const CMatrix& u) {
  return std::max({spectral_norm(u * s1.a() - s2.a() * u),
                   spectral_norm(u * s1.b() - s2.b()),
                   spectral_norm(s1.c() - s2.c() * u),
                   spectral_norm(s1.d() - s2.d()),
                   spectral_norm(u.adjoint() * u - identity(u.cols()))});
}

std::optional<CMatrix> unitarily_similar(const DiscreteSystem& s1,
                                         const DiscreteSystem& s2) {
  if (s1.input_dim() != s2.input_dim() ||
      s1.output_dim() != s2.output_dim()) {
    throw Error(ErrorCode::kDimMismatch, "input or output dimensions differ");
  }
  const Index h = s1.state_dim();
  if (h != s2.state_dim()) return std::nullopt;
  const double accept = std::max(100.0 * s1.tol().eq_abs, 1e-7);
  if (spectral_norm(s1.d() - s2.d()) > accept) return std::nullopt;
  if (h == 0) return CMatrix(0, 0);
  const Index m = s1.input_dim();
  const Index n = s1.output_dim();
  const CMatrix ih = identity(h);
  CMatrix lhs(h * h + h * m + n * h, h * h);
  CVector rhs = CVector::Zero(lhs.rows());
  lhs.topRows(h * h) = kron(s1.a().transpose(), ih) - kron(ih, s2.a());
  lhs.middleRows(h * h, h * m) = kron(s1.b().transpose(), ih);
  rhs.segment(h * h, h * m) = vec(s2.b());
  lhs.bottomRows(n * h) = kron(ih, s2.c());
  rhs.tail(n * h) = vec(s1.c());
  Eigen::JacobiSVD<CMatrix> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CVector sol = svd.solve(rhs);
  CMatrix u = Eigen::Map<const CMatrix>(sol.data(), h, h);
  if (similarity_residual(s1, s2, u) > accept) return std::nullopt;
  return u;
}

}  // namespace schuriter
