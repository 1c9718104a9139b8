#pragma once

#include <vector>

#include "schuriter/systems.hpp"

namespace schuriter {

/// Schur parameters Gamma_0, Gamma_1, ... of a contractive function.
/// Gamma_n acts from the coordinates of doms[n] to those of codoms[n].
/// doms[0] and codoms[0] are the input and output spaces; doms[n + 1] is the
/// defect space of Gamma_n written in the coordinates of doms[n] (likewise
/// codoms[n + 1] for Gamma_n^H), so both lists are one longer than gammas.
struct ChoiceSequence {
  std::vector<CMatrix> gammas;
  std::vector<Subspace> doms;
  std::vector<Subspace> codoms;
  bool terminated = false;

  // Basis of the domain of Gamma_n inside the input space.
  CMatrix lifted_domain(std::size_t n) const;
  CMatrix lifted_codomain(std::size_t n) const;
};

// Throws kInvalidSequence on broken shape chains, non-contractive entries,
// defect bases that do not span the defect spaces, or a unitary entry before
// the last one.
void validate(const ChoiceSequence& seq, const Tolerance& tol = {});

/// Z(lambda) with Theta(lambda) = shmulyan_transform(Theta(0), Z(lambda)),
/// in the coordinates of defect_bases(Theta(0)).
DiskFunction moebius_parameter(const DiskFunction& theta,
                               const Tolerance& tol = {});

/// Theta(lambda) = shmulyan_transform(gamma, lambda * next(lambda)).
DiskFunction moebius_compose(const CMatrix& gamma, const DiskFunction& next,
                             const Tolerance& tol = {});
DiskFunction moebius_compose(const CMatrix& gamma, const Subspace& dom,
                             const Subspace& codom, const DiskFunction& next,
                             const Tolerance& tol = {});

struct OracleStep {
  CMatrix gamma;
  Subspace dom;    // defect space of gamma
  Subspace codom;  // defect space of gamma^H
  DiskFunction next;
};

/// One step of the Schur algorithm on a sampled function.  next(0) is the
/// mean of Z(lambda) / lambda over a circle, and near the origin next is
/// evaluated by the Cauchy integral over the same circle.
/// Throws kUnitaryParameter if theta(0) is unitary.
OracleStep oracle_step(const DiskFunction& theta, const Tolerance& tol = {});

/// Repeated oracle_step until a unitary parameter or n_max.  A parameter
/// counts as unitary when its singular values are within unit_tol of 1.
ChoiceSequence oracle_sequence(const DiskFunction& theta, int n_max,
                               const Tolerance& tol = {},
                               double unit_tol = 1e-8);

/// Function with the given Schur parameters; a non-terminated sequence is
/// closed with the zero function.
DiskFunction reconstruct(const ChoiceSequence& seq, const Tolerance& tol = {});

/// Schur parameters read off a simple conservative system.
/// Throws kNotSimpleConservative or kRangeInclusionViolated.
ChoiceSequence gamma_from_realization(const DiscreteSystem& sys, int n_max);

/// The three systems describing the first Schur iterate: nu on the whole
/// state space, zeta1 on ker D_{A*} and zeta2 on ker D_A.
struct FirstIterates {
  DiscreteSystem nu;
  DiscreteSystem zeta1;
  DiscreteSystem zeta2;
};

// Throws kUnitaryTheta0 if D is unitary.
FirstIterates first_iterate_systems(const DiscreteSystem& sys);

/// tau_n^(k), k = 0..n: state space H(n-k, k), input and output the defect
/// spaces of Gamma_{n-1}, transfer function Theta_n.  At the termination
/// step the systems have zero state and D-block Gamma_n.
/// Throws kTerminated past the termination step.
std::vector<DiscreteSystem> iterate_systems(const DiscreteSystem& sys, int n);

struct SchurChain {
  DiscreteSystem source;
  ChoiceSequence params;
  std::vector<Subspace> h_chain;                    // H(n, 0), n = 0..N
  std::vector<std::vector<DiscreteSystem>> iterates;  // iterates[n][k]
};

SchurChain build_chain(const DiscreteSystem& sys, int n_max);

struct ChainThresholds {
  double gamma = 1e-7;
  double transfer_oracle = 1e-6;
  double transfer_across_k = 1e-7;
  double similarity = 1e-7;
  double pure_part = 1e-7;
  double unitarity = 1e-9;
};

struct ChainReport {
  double gamma_mismatch = 0.0;      // oracle against realization, aligned
  double transfer_oracle = 0.0;     // transfer of tau_n^(k) against oracle
  double transfer_across_k = 0.0;   // transfer of tau_n^(k) against k = 0
  double similarity = 0.0;          // certificates between tau_n^(0), ^(k)
  double pure_part = 0.0;           // pure part against char. function
  double unitarity = 0.0;           // colligations of every tau_n^(k)
  bool termination_agrees = true;
  bool shapes_ok = true;

  bool passed(const ChainThresholds& th = {}) const;
  double max_residual() const;
};

ChainReport verify_chain(const SchurChain& chain,
                         const std::vector<Complex>& grid = sample_grid());

}  // namespace schuriter
