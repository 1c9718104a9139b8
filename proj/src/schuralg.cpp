#include "schuriter/schuralg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "schuriter/error.hpp"

namespace schuriter {
namespace {

constexpr double kCircleRadius = 0.5;
constexpr int kCircleNodes = 64;
constexpr double kNearOrigin = 0.25;
constexpr double kInf = std::numeric_limits<double>::infinity();

CMatrix power(const CMatrix& a, Index n) {
  CMatrix p = identity(a.rows());
  for (Index i = 0; i < n; ++i) p = a * p;
  return p;
}

DiskFunction constant(const CMatrix& value) {
  return DiskFunction(value.cols(), value.rows(),
                      [value](Complex) { return value; });
}

Tolerance termination_tol(const Tolerance& tol) {
  return Tolerance{tol.rank_rel, 10.0 * tol.rank_rel};
}

struct OracleRun {
  ChoiceSequence seq;
  std::vector<DiskFunction> thetas;
};

OracleRun oracle_run(const DiskFunction& theta, int n_max,
                     const Tolerance& tol, double unit_tol) {
  OracleRun run;
  run.seq.doms.push_back(Subspace::full(theta.in_dim()));
  run.seq.codoms.push_back(Subspace::full(theta.out_dim()));
  DiskFunction current = theta;
  for (int n = 0;; ++n) {
    run.thetas.push_back(current);
    const CMatrix gamma = current(Complex(0.0, 0.0));
    run.seq.gammas.push_back(gamma);
    if (is_unitary(gamma, Tolerance{tol.rank_rel, unit_tol})) {
      run.seq.terminated = true;
      run.seq.doms.emplace_back(gamma.cols());
      run.seq.codoms.emplace_back(gamma.rows());
      break;
    }
    if (n == n_max) {
      const DefectBases db = defect_bases(gamma, tol);
      run.seq.doms.push_back(db.space);
      run.seq.codoms.push_back(db.space_star);
      break;
    }
    OracleStep step = oracle_step(current, tol);
    run.seq.doms.push_back(step.dom);
    run.seq.codoms.push_back(step.codom);
    current = step.next;
  }
  return run;
}

// Chain data of the realization formulas.  p[n] maps the input space onto
// the coordinates of doms[n] through the inverted defect operators of
// Gamma_0..Gamma_{n-1}; p_star[n] does the same on the output side.
struct Realization {
  ChoiceSequence seq;
  std::vector<CMatrix> p;
  std::vector<CMatrix> p_star;
};

void require_simple_conservative(const DiscreteSystem& sys) {
  const Classification cls = classify(sys);
  if (!cls.conservative || !cls.simple) {
    throw Error(ErrorCode::kNotSimpleConservative,
                "system is not simple conservative");
  }
}

void require_inclusion(const CMatrix& x, const Subspace& s, const char* what) {
  const double scale = std::max(1.0, spectral_norm(x));
  const double leak = spectral_norm(x - projector(s) * x);
  if (leak > 1e-6 * scale) {
    throw Error(ErrorCode::kRangeInclusionViolated,
                std::string(what) + " leaves the defect space by " +
                    std::to_string(leak));
  }
}

Realization realize(const DiscreteSystem& sys, int n_max) {
  if (n_max < 0) {
    throw Error(ErrorCode::kShapeMismatch, "n_max must be nonnegative");
  }
  require_simple_conservative(sys);
  const Tolerance& tol = sys.tol();
  const Contraction a(sys.a(), tol);
  Realization r;
  r.seq.doms.push_back(Subspace::full(sys.input_dim()));
  r.seq.codoms.push_back(Subspace::full(sys.output_dim()));
  r.p.push_back(identity(sys.input_dim()));
  r.p_star.push_back(identity(sys.output_dim()));
  r.seq.gammas.push_back(sys.d());
  for (int n = 0;; ++n) {
    const CMatrix& gamma = r.seq.gammas[n];
    if (is_unitary(gamma, termination_tol(tol))) {
      r.seq.terminated = true;
      r.seq.doms.emplace_back(gamma.cols());
      r.seq.codoms.emplace_back(gamma.rows());
      break;
    }
    const DefectBases db = defect_bases(gamma, tol);
    r.seq.doms.push_back(db.space);
    r.seq.codoms.push_back(db.space_star);
    if (n == n_max) break;

    const CMatrix qn = h_subspace(a, n, 0).basis();
    const CMatrix q0n = h_subspace(a, 0, n).basis();
    require_inclusion(r.p[n] * sys.b().adjoint() * qn, db.space, "B^H");
    require_inclusion(r.p_star[n] * sys.c() * q0n, db.space_star, "C");
    r.p.push_back(db.space.basis().adjoint() * pinv(db.d, tol) * r.p[n]);
    r.p_star.push_back(db.space_star.basis().adjoint() *
                       pinv(db.d_star, tol) * r.p_star[n]);
    const CMatrix out = r.p_star[n + 1] * sys.c() * power(sys.a(), n) * qn;
    const CMatrix in = r.p[n + 1] * sys.b().adjoint() * qn;
    r.seq.gammas.push_back(out * in.adjoint());
  }
  return r;
}

std::vector<DiscreteSystem> iterates_from(const DiscreteSystem& sys,
                                          const Realization& r, int n) {
  if (n == 0) return {sys};
  const Tolerance& tol = sys.tol();
  const Contraction a(sys.a(), tol);
  const CMatrix qn = h_subspace(a, n, 0).basis();
  const CMatrix in = r.p[n] * sys.b().adjoint() * qn;
  std::vector<DiscreteSystem> out;
  for (int k = 0; k <= n; ++k) {
    const CMatrix q = h_subspace(a, n - k, k).basis();
    out.emplace_back(r.seq.gammas[n],
                     r.p_star[n] * sys.c() * power(sys.a(), n - k) * q,
                     q.adjoint() * power(sys.a(), k) * qn * in.adjoint(),
                     q.adjoint() * sys.a() * q, tol);
  }
  return out;
}

}  // namespace

CMatrix ChoiceSequence::lifted_domain(std::size_t n) const {
  CMatrix e = doms.at(0).basis();
  for (std::size_t j = 1; j <= n; ++j) e = e * doms.at(j).basis();
  return e;
}

CMatrix ChoiceSequence::lifted_codomain(std::size_t n) const {
  CMatrix e = codoms.at(0).basis();
  for (std::size_t j = 1; j <= n; ++j) e = e * codoms.at(j).basis();
  return e;
}

void validate(const ChoiceSequence& seq, const Tolerance& tol) {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::kInvalidSequence, why);
  };
  const std::size_t len = seq.gammas.size();
  if (len == 0) fail("empty sequence");
  if (seq.doms.size() != len + 1 || seq.codoms.size() != len + 1) {
    fail("need one more defect basis than parameters");
  }
  for (std::size_t n = 0; n < len; ++n) {
    const CMatrix& g = seq.gammas[n];
    const std::string at = " at step " + std::to_string(n);
    if (g.cols() != seq.doms[n].dim() || g.rows() != seq.codoms[n].dim()) {
      fail("parameter does not act between its defect spaces" + at);
    }
    if (seq.doms[n + 1].ambient_dim() != g.cols() ||
        seq.codoms[n + 1].ambient_dim() != g.rows()) {
      fail("defect basis lives in the wrong space" + at);
    }
    if (!is_contraction(g, tol)) fail("parameter is not contractive" + at);
    const bool last = n + 1 == len;
    if (last && seq.terminated) {
      if (!is_unitary(g, Tolerance{tol.rank_rel, 1e-7})) {
        fail("terminated sequence must end with a unitary parameter");
      }
      if (!seq.doms[n + 1].is_trivial() || !seq.codoms[n + 1].is_trivial()) {
        fail("unitary parameter has nontrivial defect bases");
      }
      continue;
    }
    if (!last && is_unitary(g, termination_tol(tol))) {
      fail("unitary parameter before the end" + at);
    }
    const DefectBases db = defect_bases(g, tol);
    if (db.space.dim() != seq.doms[n + 1].dim() ||
        db.space_star.dim() != seq.codoms[n + 1].dim() ||
        subspace_distance(db.space, seq.doms[n + 1]) > std::sqrt(tol.eq_abs) ||
        subspace_distance(db.space_star, seq.codoms[n + 1]) >
            std::sqrt(tol.eq_abs)) {
      fail("defect basis does not span the defect space" + at);
    }
  }
}

DiskFunction moebius_parameter(const DiskFunction& theta,
                               const Tolerance& tol) {
  const CMatrix gamma = theta(Complex(0.0, 0.0));
  auto db = std::make_shared<const DefectBases>(defect_bases(gamma, tol));
  const Index in = db->space.dim();
  const Index out = db->space_star.dim();
  return DiskFunction(in, out, [theta, gamma, db, in, out](Complex z) {
    if (z == Complex(0.0, 0.0)) return zeros(out, in);
    return shmulyan_parameter(gamma, *db, theta(z));
  });
}

DiskFunction moebius_compose(const CMatrix& gamma, const DiskFunction& next,
                             const Tolerance& tol) {
  const DefectBases db = defect_bases(gamma, tol);
  return moebius_compose(gamma, db.space, db.space_star, next, tol);
}

DiskFunction moebius_compose(const CMatrix& gamma, const Subspace& dom,
                             const Subspace& codom, const DiskFunction& next,
                             const Tolerance& tol) {
  if (next.in_dim() != dom.dim() || next.out_dim() != codom.dim()) {
    throw Error(ErrorCode::kDimMismatch,
                "next function does not act between the defect spaces");
  }
  auto db = std::make_shared<const DefectBases>(
      defect_bases(gamma, dom, codom, tol));
  return DiskFunction(gamma.cols(), gamma.rows(),
                      [gamma, db, next, tol](Complex z) {
                        return shmulyan_transform(gamma, *db, z * next(z), tol);
                      });
}

OracleStep oracle_step(const DiskFunction& theta, const Tolerance& tol) {
  const CMatrix gamma = theta(Complex(0.0, 0.0));
  if (is_unitary(gamma, termination_tol(tol))) {
    throw Error(ErrorCode::kUnitaryParameter, "theta(0) is unitary");
  }
  auto db = std::make_shared<const DefectBases>(defect_bases(gamma, tol));
  auto direct = [theta, gamma, db](Complex z) {
    return CMatrix(shmulyan_parameter(gamma, *db, theta(z)) / z);
  };

  // Trapezoid rule on |z| = kCircleRadius; exact up to rounding for the
  // rational functions handled here.
  auto nodes = std::make_shared<std::vector<Complex>>();
  auto values = std::make_shared<std::vector<CMatrix>>();
  CMatrix mean = zeros(db->space_star.dim(), db->space.dim());
  for (int j = 0; j < kCircleNodes; ++j) {
    const Complex z =
        std::polar(kCircleRadius, 2.0 * std::numbers::pi * j / kCircleNodes);
    nodes->push_back(z);
    values->push_back(direct(z));
    mean += values->back();
  }
  mean /= static_cast<double>(kCircleNodes);

  DiskFunction next(
      db->space.dim(), db->space_star.dim(),
      [direct, nodes, values, mean](Complex z) {
        if (z == Complex(0.0, 0.0)) return mean;
        if (std::abs(z) >= kNearOrigin) return direct(z);
        CMatrix acc = zeros(mean.rows(), mean.cols());
        for (std::size_t j = 0; j < nodes->size(); ++j) {
          acc += (*values)[j] * ((*nodes)[j] / ((*nodes)[j] - z));
        }
        return CMatrix(acc / static_cast<double>(nodes->size()));
      });
  return OracleStep{gamma, db->space, db->space_star, next};
}

ChoiceSequence oracle_sequence(const DiskFunction& theta, int n_max,
                               const Tolerance& tol, double unit_tol) {
  if (n_max < 0) {
    throw Error(ErrorCode::kShapeMismatch, "n_max must be nonnegative");
  }
  return oracle_run(theta, n_max, tol, unit_tol).seq;
}

DiskFunction reconstruct(const ChoiceSequence& seq, const Tolerance& tol) {
  validate(seq, tol);
  const std::size_t last = seq.gammas.size() - 1;
  DiskFunction f = constant(seq.gammas[last]);
  for (std::size_t n = last; n-- > 0;) {
    f = moebius_compose(seq.gammas[n], seq.doms[n + 1], seq.codoms[n + 1], f,
                        tol);
  }
  return f;
}

ChoiceSequence gamma_from_realization(const DiscreteSystem& sys, int n_max) {
  return realize(sys, n_max).seq;
}

FirstIterates first_iterate_systems(const DiscreteSystem& sys) {
  require_simple_conservative(sys);
  const Tolerance& tol = sys.tol();
  if (is_unitary(sys.d(), termination_tol(tol))) {
    throw Error(ErrorCode::kUnitaryTheta0, "D is unitary");
  }
  const Contraction a(sys.a(), tol);
  const DefectBases db = defect_bases(sys.d(), tol);
  const CMatrix& v0 = db.space.basis();
  const CMatrix dinv = v0.adjoint() * pinv(db.d, tol);
  const CMatrix dsinv = db.space_star.basis().adjoint() * pinv(db.d_star, tol);
  const CMatrix gamma1 = dsinv * sys.c() * sys.b() * dinv.adjoint();
  const CMatrix c0 = dsinv * sys.c();
  const CMatrix f = pinv(a.d_a_star(), tol) * sys.b() * v0;
  const CMatrix a_ker = sys.a() * projector(kernel_basis(a.d_a(), tol));
  const CMatrix q01 = h_subspace(a, 0, 1).basis();
  const CMatrix q10 = h_subspace(a, 1, 0).basis();
  return FirstIterates{
      DiscreteSystem(zeros(c0.rows(), f.cols()), c0, f, a_ker, tol),
      DiscreteSystem(gamma1, c0 * q01, q01.adjoint() * a_ker * f,
                     q01.adjoint() * sys.a() * q01, tol),
      DiscreteSystem(gamma1, c0 * sys.a() * q10, q10.adjoint() * f,
                     q10.adjoint() * sys.a() * q10, tol)};
}

std::vector<DiscreteSystem> iterate_systems(const DiscreteSystem& sys,
                                            int n) {
  if (n < 0) throw Error(ErrorCode::kShapeMismatch, "n must be nonnegative");
  const Realization r = realize(sys, n);
  if (static_cast<int>(r.seq.gammas.size()) <= n) {
    throw Error(ErrorCode::kTerminated,
                "Schur algorithm stopped at step " +
                    std::to_string(r.seq.gammas.size() - 1));
  }
  return iterates_from(sys, r, n);
}

SchurChain build_chain(const DiscreteSystem& sys, int n_max) {
  Realization r = realize(sys, n_max);
  const Contraction a(sys.a(), sys.tol());
  SchurChain chain{sys, r.seq, {}, {}};
  for (int n = 0; n < static_cast<int>(r.seq.gammas.size()); ++n) {
    chain.h_chain.push_back(h_subspace(a, n, 0));
    chain.iterates.push_back(iterates_from(sys, r, n));
  }
  return chain;
}

bool ChainReport::passed(const ChainThresholds& th) const {
  return termination_agrees && shapes_ok && gamma_mismatch <= th.gamma &&
         transfer_oracle <= th.transfer_oracle &&
         transfer_across_k <= th.transfer_across_k &&
         similarity <= th.similarity && pure_part <= th.pure_part &&
         unitarity <= th.unitarity;
}

double ChainReport::max_residual() const {
  return std::max({gamma_mismatch, transfer_oracle, transfer_across_k,
                   similarity, pure_part, unitarity});
}

ChainReport verify_chain(const SchurChain& chain,
                         const std::vector<Complex>& grid) {
  const Tolerance& tol = chain.source.tol();
  const ChoiceSequence& real = chain.params;
  ChainReport rep;
  try {
    validate(real, tol);
  } catch (const Error&) {
    rep.shapes_ok = false;
  }
  const int last = static_cast<int>(real.gammas.size()) - 1;
  if (static_cast<int>(chain.iterates.size()) != last + 1) {
    rep.shapes_ok = false;
  }

  const OracleRun oracle =
      oracle_run(transfer_function(chain.source), last, tol, 1e-8);
  const int common =
      std::min<int>(last, static_cast<int>(oracle.seq.gammas.size()) - 1);
  if (static_cast<int>(oracle.seq.gammas.size()) != last + 1 ||
      oracle.seq.terminated != real.terminated) {
    rep.termination_agrees = false;
  }

  for (int n = 0; n <= common; ++n) {
    const CMatrix wd =
        oracle.seq.lifted_domain(n).adjoint() * real.lifted_domain(n);
    const CMatrix wc =
        oracle.seq.lifted_codomain(n).adjoint() * real.lifted_codomain(n);
    if (wd.rows() != wd.cols() || wc.rows() != wc.cols()) {
      rep.gamma_mismatch = kInf;
      rep.termination_agrees = false;
      break;
    }
    const double align = std::max(unitarity_residual(wd), unitarity_residual(wc));
    rep.gamma_mismatch = std::max(
        {rep.gamma_mismatch, align,
         spectral_norm(oracle.seq.gammas[n] -
                       wc * real.gammas[n] * wd.adjoint())});

    if (n >= static_cast<int>(chain.iterates.size())) continue;
    const std::vector<DiscreteSystem>& taus = chain.iterates[n];
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const DiscreteSystem& tau = taus[k];
      if (tau.input_dim() != real.doms[n].dim() ||
          tau.output_dim() != real.codoms[n].dim()) {
        rep.shapes_ok = false;
        continue;
      }
      rep.unitarity = std::max(rep.unitarity,
                               unitarity_residual(tau.block().assembled()));
      for (Complex z : grid) {
        const CMatrix t = transfer(tau, z);
        rep.transfer_oracle = std::max(
            rep.transfer_oracle,
            spectral_norm(oracle.thetas[n](z) - wc * t * wd.adjoint()));
        if (k > 0) {
          rep.transfer_across_k = std::max(
              rep.transfer_across_k, spectral_norm(t - transfer(taus[0], z)));
        }
      }
      if (k > 0) {
        const auto u = unitarily_similar(taus[0], tau);
        rep.similarity = std::max(
            rep.similarity, u ? similarity_residual(taus[0], tau, *u) : kInf);
      }

      // The pure part of the transfer function coincides with the
      // characteristic function of the adjoint state operator.
      try {
        const KmxParams p = decompose_kmx(tau.block(), tol);
        const CMatrix& v = real.doms[n + 1].basis();
        const CMatrix& w = real.codoms[n + 1].basis();
        const CMatrix left = w.adjoint() * p.k;
        const CMatrix right = p.m * v;
        double worst =
            std::max(unitarity_residual(left), unitarity_residual(right));
        for (Complex z : grid) {
          const CMatrix phi =
              char_function_value(tau.a().adjoint(), p.d_a_star.basis(),
                                  p.d_a.basis(), z, tol);
          worst = std::max(worst, spectral_norm(w.adjoint() * transfer(tau, z) *
                                                    v -
                                                left * phi * right));
        }
        rep.pure_part = std::max(rep.pure_part, worst);
      } catch (const Error&) {
        rep.pure_part = kInf;
      }
    }
  }
  return rep;
}

}  // namespace schuriter
