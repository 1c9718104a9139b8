#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "schuriter/blockparam.hpp"
#include "schuriter/contraction.hpp"
#include "schuriter/matnum.hpp"

namespace schuriter {

/// Discrete-time system
///   h_{k+1} = A h_k + B xi_k,   sigma_k = C h_k + D xi_k
/// stored as the block matrix [D C; B A] on M (+) H -> N (+) H.
class DiscreteSystem {
 public:
  // Throws kShapeMismatch unless the state block is square.
  explicit DiscreteSystem(BlockMatrix block, const Tolerance& tol = {});
  DiscreteSystem(CMatrix d, CMatrix c, CMatrix b, CMatrix a,
                 const Tolerance& tol = {});

  const BlockMatrix& block() const { return block_; }
  const CMatrix& d() const { return block_.d(); }
  const CMatrix& c() const { return block_.c(); }
  const CMatrix& b() const { return block_.b(); }
  const CMatrix& a() const { return block_.a(); }
  Index input_dim() const { return block_.m(); }
  Index output_dim() const { return block_.n(); }
  Index state_dim() const { return block_.h(); }
  const Tolerance& tol() const { return tol_; }

 private:
  BlockMatrix block_;
  Tolerance tol_;
};

/// Operator-valued function on the open unit disk, evaluated pointwise.
class DiskFunction {
 public:
  using Evaluator = std::function<CMatrix(Complex)>;

  DiskFunction(Index in_dim, Index out_dim, Evaluator eval);

  // Throws kOutsideDisk for |lambda| >= 1.
  CMatrix operator()(Complex lambda) const;
  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }

 private:
  Index in_dim_;
  Index out_dim_;
  Evaluator eval_;
};

/// 0 followed by radii x {2 pi j / angles}.
std::vector<Complex> sample_grid(const std::vector<double>& radii = {0.3, 0.6,
                                                                     0.9},
                                 int angles = 8);

// Largest spectral-norm difference over the grid.  Throws kDimMismatch.
double grid_distance(const DiskFunction& f, const DiskFunction& g,
                     const std::vector<Complex>& grid);

/// D + lambda C (I - lambda A)^{-1} B.  Throws kOutsideDisk.
CMatrix transfer(const DiscreteSystem& sys, Complex lambda);
DiskFunction transfer_function(const DiscreteSystem& sys);

struct Trajectory {
  std::vector<CVector> states;   // h_0 .. h_N
  std::vector<CVector> outputs;  // sigma_0 .. sigma_{N-1}
};

Trajectory simulate(const DiscreteSystem& sys,
                    const std::vector<CVector>& inputs, const CVector& h0);

struct Classification {
  bool passive = false;
  bool isometric = false;
  bool coisometric = false;
  bool conservative = false;
  bool controllable = false;
  bool observable = false;
  bool simple = false;
  bool minimal = false;
  // For conservative systems the Krylov ranks must match the defect-kernel
  // description of the unreachable and unobservable parts.
  bool subspace_cross_check = true;
};

Classification classify(const DiscreteSystem& sys);

Subspace controllable_subspace(const DiscreteSystem& sys);
Subspace observable_subspace(const DiscreteSystem& sys);

/// Sigma = [-A, D_{A*}; D_A, A^H] with input D_A and output D_{A*}, both in
/// the bases stored in the Contraction.  Its transfer function is the
/// characteristic function of A.
DiscreteSystem char_colligation(const Contraction& a);
DiskFunction char_function(const Contraction& a);

/// Splitting of Theta(0) into a pure part between the defect spaces and a
/// unitary part between the kernels of the defect operators.
struct PurePart {
  Subspace in_defect;    // closure of ran D_{Theta(0)}
  Subspace in_kernel;    // ker D_{Theta(0)}
  Subspace out_defect;   // closure of ran D_{Theta(0)*}
  Subspace out_kernel;   // ker D_{Theta(0)*}
  CMatrix pure;          // Theta(0) between the defect spaces
  CMatrix unitary;       // Theta(0) between the kernels
  double off_diagonal = 0.0;
};

PurePart pure_part(const CMatrix& theta0, const Tolerance& tol = {});

/// Restricts theta to the defect spaces of theta(0).
DiskFunction pure_part_function(const DiskFunction& theta,
                                const Tolerance& tol = {});

/// Omega = (H^o)-perp minus A (H^o)-perp, Omega_* = (H^c)-perp minus
/// A^H (H^c)-perp, together with phi = P_Omega (I - lambda A)^{-1} B and
/// psi = C (I - lambda A)^{-1} restricted to Omega_*.
struct DefectFunctions {
  Subspace omega;
  Subspace omega_star;
  DiskFunction phi;
  DiskFunction psi;
};

// Throws kNotSimpleConservative.
DefectFunctions defect_functions(const DiscreteSystem& sys);

// The wandering subspaces above for any conservative system.
std::pair<Subspace, Subspace> wandering_subspaces(const DiscreteSystem& sys);

/// Unitary U with U A1 = A2 U, U B1 = B2, C1 = C2 U and D1 = D2, or nullopt.
/// Throws kDimMismatch if input or output dimensions differ.
std::optional<CMatrix> unitarily_similar(const DiscreteSystem& s1,
                                         const DiscreteSystem& s2);

// Largest residual of the four similarity relations and of U^H U = I.
double similarity_residual(const DiscreteSystem& s1, const DiscreteSystem& s2,
                           const CMatrix& u);

}  // namespace schuriter
