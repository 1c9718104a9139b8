#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "scalar_schur.hpp"
#include "schuriter/error.hpp"
#include "schuriter/schuralg.hpp"

namespace schuriter {
namespace {

using testing::blaschke_one;
using testing::dist;
using testing::real_matrix;
using testing::square_chain;

CMatrix scalar(Complex z) { return CMatrix::Constant(1, 1, z); }

DiskFunction constant(const CMatrix& v) {
  return DiskFunction(v.cols(), v.rows(), [v](Complex) { return v; });
}

DiskFunction scalar_fn(std::function<Complex(Complex)> f) {
  return DiskFunction(1, 1, [f](Complex z) { return scalar(f(z)); });
}

Complex blaschke(Complex z, double a) { return (z + a) / (1.0 + a * z); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidTolerance;
}

const std::vector<Complex> kGrid = sample_grid();

TEST(OracleStep, Examples) {
  const OracleStep s = oracle_step(scalar_fn([](Complex z) { return blaschke(z, 0.4); }));
  EXPECT_NEAR(std::abs(s.gamma(0, 0) - 0.4), 0.0, 1e-15);
  for (Complex z : kGrid) EXPECT_LT(std::abs(s.next(z)(0, 0) - 1.0), 1e-12);

  const OracleStep c = oracle_step(constant(scalar(0.3)));
  for (Complex z : kGrid) EXPECT_LT(std::abs(c.next(z)(0, 0)), 1e-15);
  const ChoiceSequence cs = oracle_sequence(constant(scalar(0.3)), 4);
  ASSERT_EQ(cs.gammas.size(), 5u);
  for (std::size_t n = 1; n < 5; ++n) EXPECT_LT(std::abs(cs.gammas[n](0, 0)), 1e-15);
  EXPECT_FALSE(cs.terminated);

  const ChoiceSequence sq = oracle_sequence(scalar_fn([](Complex z) { return z * z; }), 5);
  ASSERT_EQ(sq.gammas.size(), 3u);
  EXPECT_TRUE(sq.terminated);
  EXPECT_LT(std::abs(sq.gammas[0](0, 0)), 1e-15);
  EXPECT_LT(std::abs(sq.gammas[1](0, 0)), 1e-12);
  EXPECT_LT(std::abs(sq.gammas[2](0, 0) - 1.0), 1e-12);

  EXPECT_EQ(code_of([] { oracle_step(constant(scalar(1.0))); }),
            ErrorCode::kUnitaryParameter);
}

TEST(OracleStep, ComposeInvertsStep) {
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteSystem s = random_conservative_system(2, 3, rng);
    const DiskFunction theta = transfer_function(s);
    const OracleStep st = oracle_step(theta);
    const DiskFunction back = moebius_compose(st.gamma, st.dom, st.codom, st.next);
    EXPECT_LE(grid_distance(theta, back, kGrid), Tolerance{}.eq_abs);
  }
}

TEST(MoebiusParameter, Examples) {
  const DiskFunction z0 = moebius_parameter(constant(scalar(0.3)));
  for (Complex z : kGrid) EXPECT_LT(std::abs(z0(z)(0, 0)), 1e-15);

  const DiskFunction id2 = moebius_parameter(
      DiskFunction(2, 2, [](Complex z) { return CMatrix(z * identity(2)); }));
  for (Complex z : kGrid) EXPECT_LT(dist(id2(z), z * identity(2)), 1e-14);

  const DiskFunction zb = moebius_parameter(scalar_fn([](Complex z) { return blaschke(z, 0.4); }));
  for (Complex z : kGrid) EXPECT_LT(std::abs(zb(z)(0, 0) - z), 1e-14);
}

TEST(MoebiusParameter, Bounds) {
  Rng rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteSystem s = random_conservative_system(1 + trial % 3, 2 + trial % 4, rng);
    const DiskFunction z = moebius_parameter(transfer_function(s));
    EXPECT_EQ(spectral_norm(z(0.0)), 0.0);
    for (Complex l : kGrid) {
      EXPECT_LE(spectral_norm(z(l)), std::abs(l) + 1e-9);
    }
  }
}

TEST(MoebiusCompose, Examples) {
  Rng rng(73);
  const CMatrix g = 0.5 * random_contraction(2, 2, rng);
  const DiskFunction zero(2, 2, [](Complex) { return zeros(2, 2); });
  const DiskFunction c = moebius_compose(g, zero);
  for (Complex z : kGrid) EXPECT_LT(dist(c(z), g), 1e-15);

  const DiskFunction next = transfer_function(random_conservative_system(1, 2, rng));
  const DiskFunction lam = moebius_compose(zeros(1, 1), next);
  for (Complex z : kGrid) EXPECT_LT(dist(lam(z), z * next(z)), 1e-15);

  const DiskFunction b = moebius_compose(scalar(0.4), constant(scalar(1.0)));
  for (Complex z : kGrid) EXPECT_LT(std::abs(b(z)(0, 0) - blaschke(z, 0.4)), 1e-15);

  EXPECT_EQ(code_of([&] { moebius_compose(scalar(0.4), zero); }),
            ErrorCode::kDimMismatch);
}

ChoiceSequence scalar_sequence(std::vector<double> gammas, bool terminated) {
  ChoiceSequence s;
  s.doms.push_back(Subspace::full(1));
  s.codoms.push_back(Subspace::full(1));
  for (double g : gammas) {
    s.gammas.push_back(scalar(g));
    const bool unit = std::abs(std::abs(g) - 1.0) < 1e-12;
    s.doms.push_back(unit ? Subspace(1) : Subspace::full(1));
    s.codoms.push_back(unit ? Subspace(1) : Subspace::full(1));
  }
  s.terminated = terminated;
  return s;
}

TEST(Reconstruct, Examples) {
  const DiskFunction one = reconstruct(scalar_sequence({1.0}, true));
  for (Complex z : kGrid) EXPECT_LT(std::abs(one(z)(0, 0) - 1.0), 1e-15);

  const DiskFunction sq = reconstruct(scalar_sequence({0, 0, 1}, true));
  for (Complex z : kGrid) EXPECT_LT(std::abs(sq(z)(0, 0) - z * z), 1e-15);

  const DiskFunction c = reconstruct(scalar_sequence({0.4}, false));
  for (Complex z : kGrid) EXPECT_LT(std::abs(c(z)(0, 0) - 0.4), 1e-15);

  ChoiceSequence broken = scalar_sequence({0.4, 0.2}, false);
  broken.gammas[1] = zeros(2, 1);
  EXPECT_EQ(code_of([&] { reconstruct(broken); }), ErrorCode::kInvalidSequence);
  EXPECT_EQ(code_of([] { reconstruct(scalar_sequence({1.0, 0.5}, false)); }),
            ErrorCode::kInvalidSequence);
}

TEST(GammaFromRealization, Examples) {
  const ChoiceSequence sq = gamma_from_realization(square_chain(), 5);
  ASSERT_EQ(sq.gammas.size(), 3u);
  EXPECT_TRUE(sq.terminated);
  EXPECT_LT(std::abs(sq.gammas[0](0, 0)), 1e-15);
  EXPECT_LT(std::abs(sq.gammas[1](0, 0)), 1e-15);
  EXPECT_LT(std::abs(sq.gammas[2](0, 0) - 1.0), 1e-15);
  EXPECT_TRUE(h_subspace(Contraction(square_chain().a()), 2, 0).is_trivial());

  const ChoiceSequence b = gamma_from_realization(blaschke_one(), 5);
  ASSERT_EQ(b.gammas.size(), 2u);
  EXPECT_TRUE(b.terminated);
  EXPECT_NEAR(b.gammas[0](0, 0).real(), 0.4, 1e-15);
  EXPECT_NEAR(b.gammas[1](0, 0).real(), 1.0, 1e-14);

  Rng rng(74);
  const CMatrix u = haar_unitary(2, rng);
  const DiscreteSystem d_unitary(u, zeros(2, 0), zeros(0, 2), zeros(0, 0));
  const ChoiceSequence du = gamma_from_realization(d_unitary, 3);
  ASSERT_EQ(du.gammas.size(), 1u);
  EXPECT_TRUE(du.terminated);

  EXPECT_EQ(code_of([] {
              gamma_from_realization(
                  DiscreteSystem(BlockMatrix::split(0.5 * identity(2), 1, 1)), 2);
            }),
            ErrorCode::kNotSimpleConservative);
}

TEST(GammaFromRealization, TruncatedAtNMax) {
  Rng rng(75);
  const DiscreteSystem s = random_conservative_system(1, 4, rng);
  const ChoiceSequence seq = gamma_from_realization(s, 1);
  EXPECT_EQ(seq.gammas.size(), 2u);
  EXPECT_FALSE(seq.terminated);
  EXPECT_NO_THROW(validate(seq));
}

TEST(GammaFromRealization, ScalarOracle) {
  Rng rng(76);
  for (int trial = 0; trial < 20; ++trial) {
    const Index h = 1 + trial % 5;
    const DiscreteSystem s = random_conservative_system(1, h, rng);
    const ChoiceSequence seq = gamma_from_realization(s, static_cast<int>(h) + 1);
    const testing::ScalarSchur ref = testing::scalar_schur(
        testing::taylor(s, 2 * static_cast<int>(h) + 4), static_cast<int>(h) + 1, 1e-8);
    ASSERT_EQ(seq.gammas.size(), ref.gammas.size());
    EXPECT_TRUE(seq.terminated);
    EXPECT_TRUE(ref.terminated);
    EXPECT_LE(seq.gammas.size(), static_cast<std::size_t>(h) + 1);
    for (std::size_t n = 0; n < ref.gammas.size(); ++n) {
      EXPECT_LE(std::abs(seq.lifted_codomain(n)(0, 0) * seq.gammas[n](0, 0) *
                             std::conj(seq.lifted_domain(n)(0, 0)) -
                         ref.gammas[n]),
                1e-7);
    }
  }
}

TEST(GammaFromRealization, TerminationChain) {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Index h = 2 + trial % 5;
    const DiscreteSystem s = random_conservative_system(1 + trial % 3, h, rng);
    const SchurChain chain = build_chain(s, static_cast<int>(h) + 1);
    EXPECT_TRUE(chain.params.terminated);
    EXPECT_LE(chain.params.gammas.size(), static_cast<std::size_t>(h) + 1);
    EXPECT_TRUE(is_unitary(chain.params.gammas.back(), Tolerance{1e-10, 1e-8}));
    for (std::size_t n = 1; n < chain.h_chain.size(); ++n) {
      EXPECT_LT(chain.h_chain[n].dim(), chain.h_chain[n - 1].dim());
    }
    EXPECT_TRUE(chain.h_chain.back().is_trivial());
  }
}

TEST(GammaFromRealization, IsometricParametersMatchKernelChains) {
  Rng rng(78);
  for (int trial = 0; trial < 15; ++trial) {
    const DiscreteSystem s = random_conservative_system(1 + trial % 2, 2 + trial % 4, rng);
    const Contraction a(s.a());
    const ChoiceSequence seq = gamma_from_realization(s, 10);
    for (int n = 0; n < static_cast<int>(seq.gammas.size()); ++n) {
      const CMatrix& g = seq.gammas[n];
      const bool iso = is_isometry(g, Tolerance{1e-10, 1e-8});
      const bool coiso = is_coisometry(g, Tolerance{1e-10, 1e-8});
      EXPECT_EQ(iso, h_subspace(a, n + 1, 0).dim() == h_subspace(a, n, 0).dim());
      EXPECT_EQ(coiso, h_subspace(a, 0, n + 1).dim() == h_subspace(a, 0, n).dim());
      // ker D_{A*^n} inside ker D_A.
      const Subspace k0n = h_subspace(a, 0, n);
      const Subspace k10 = h_subspace(a, 1, 0);
      const bool inside =
          spectral_norm((identity(s.state_dim()) - projector(k10)) * k0n.basis()) < 1e-8;
      EXPECT_EQ(iso, inside);
    }
  }
}

TEST(FirstIterates, Examples) {
  const FirstIterates sq = first_iterate_systems(square_chain());
  EXPECT_EQ(sq.zeta2.state_dim(), 1);
  EXPECT_LT(spectral_norm(sq.zeta2.a()), 1e-15);
  for (Complex z : kGrid) {
    EXPECT_LT(std::abs(std::abs(transfer(sq.zeta2, z)(0, 0)) - std::abs(z)), 1e-15);
    EXPECT_LT(std::abs(transfer(sq.zeta2, z)(0, 0) - z), 1e-15);
  }

  const FirstIterates b = first_iterate_systems(blaschke_one());
  EXPECT_EQ(b.zeta1.state_dim(), 0);
  EXPECT_EQ(b.zeta2.state_dim(), 0);
  EXPECT_NEAR(std::abs(b.zeta2.d()(0, 0)), 1.0, 1e-14);

  Rng rng(87);
  const DiscreteSystem d_unitary(haar_unitary(2, rng), zeros(2, 0), zeros(0, 2),
                                 zeros(0, 0));
  EXPECT_EQ(code_of([&] { first_iterate_systems(d_unitary); }),
            ErrorCode::kUnitaryTheta0);

  EXPECT_EQ(code_of([] {
              first_iterate_systems(DiscreteSystem(
                  BlockMatrix::split(real_matrix(2, 2, {1, 0, 0, 1}), 1, 1)));
            }),
            ErrorCode::kNotSimpleConservative);
}

TEST(FirstIterates, TransferFunctions) {
  Rng rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteSystem s = random_conservative_system(1 + trial % 3, 2 + trial % 3, rng);
    const FirstIterates f = first_iterate_systems(s);
    const OracleStep st = oracle_step(transfer_function(s));
    for (const DiscreteSystem* z : {&f.zeta1, &f.zeta2}) {
      EXPECT_LE(unitarity_residual(z->block().assembled()), 1e-9);
      EXPECT_TRUE(classify(*z).simple);
    }
    EXPECT_LE(unitarity_residual(f.nu.block().assembled()), 1e-9);
    for (Complex l : kGrid) {
      // Both sides are written in the defect bases of D.
      EXPECT_LE(dist(transfer(f.zeta1, l), st.next(l)), 1e-6);
      EXPECT_LE(dist(transfer(f.zeta2, l), st.next(l)), 1e-6);
      EXPECT_LE(dist(transfer(f.nu, l), l * st.next(l)), 1e-6);
    }
  }
}

TEST(IterateSystems, Examples) {
  const auto t1 = iterate_systems(square_chain(), 1);
  ASSERT_EQ(t1.size(), 2u);
  EXPECT_EQ(t1[0].state_dim(), 1);
  for (Complex z : kGrid) EXPECT_LT(std::abs(transfer(t1[0], z)(0, 0) - z), 1e-15);

  // Step 2 is the termination step: zero state, constant unitary 1.
  const auto t2 = iterate_systems(square_chain(), 2);
  ASSERT_EQ(t2.size(), 3u);
  for (const auto& t : t2) {
    EXPECT_EQ(t.state_dim(), 0);
    EXPECT_NEAR(std::abs(t.d()(0, 0)), 1.0, 1e-15);
  }
  EXPECT_EQ(code_of([] { iterate_systems(square_chain(), 3); }),
            ErrorCode::kTerminated);
}

TEST(IterateSystems, StepOneMatchesFirstIterates) {
  Rng rng(80);
  for (int trial = 0; trial < 8; ++trial) {
    const DiscreteSystem s = random_conservative_system(2, 3 + trial % 3, rng);
    const FirstIterates f = first_iterate_systems(s);
    const auto t = iterate_systems(s, 1);
    ASSERT_EQ(t.size(), 2u);
    const auto u2 = unitarily_similar(t[0], f.zeta2);
    const auto u1 = unitarily_similar(t[1], f.zeta1);
    ASSERT_TRUE(u2.has_value());
    ASSERT_TRUE(u1.has_value());
    EXPECT_LE(similarity_residual(t[0], f.zeta2, *u2), 1e-8);
    EXPECT_LE(similarity_residual(t[1], f.zeta1, *u1), 1e-8);
  }
}

TEST(VerifyChain, SquareChain) {
  const ChainReport r = verify_chain(build_chain(square_chain(), 3));
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.max_residual(), 1e-9);
}

TEST(VerifyChain, RandomFourState) {
  Rng rng(81);
  for (int trial = 0; trial < 3; ++trial) {
    const DiscreteSystem s(BlockMatrix::split(haar_unitary(5, rng), 1, 1));
    if (!classify(s).simple) continue;
    const ChainReport r = verify_chain(build_chain(s, 5));
    EXPECT_TRUE(r.passed());
    EXPECT_LE(r.max_residual(), 1e-7);
  }
}

TEST(VerifyChain, CorruptedIterateIsFlagged) {
  Rng rng(82);
  const DiscreteSystem s = random_conservative_system(1, 4, rng);
  SchurChain chain = build_chain(s, 5);
  ASSERT_GE(chain.iterates.size(), 2u);
  DiscreteSystem& tau = chain.iterates[1][0];
  CMatrix b = tau.b();
  b.array() += 1e-3;
  tau = DiscreteSystem(tau.d(), tau.c(), b, tau.a(), tau.tol());
  const ChainReport r = verify_chain(chain);
  EXPECT_FALSE(r.passed());
  EXPECT_GE(r.unitarity, 1e-4);
  EXPECT_GE(std::max(r.transfer_oracle, r.transfer_across_k), 1e-4);
}

TEST(ReconstructExtract, TerminatedSequencesReproduceTransfer) {
  Rng rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteSystem s = random_conservative_system(1 + trial % 3, 2 + trial % 4, rng);
    const ChoiceSequence seq = gamma_from_realization(s, 10);
    ASSERT_TRUE(seq.terminated);
    EXPECT_LE(grid_distance(reconstruct(seq), transfer_function(s), kGrid), 1e-7);
  }
}

// The Moebius parameter of the characteristic function of A is the
// characteristic function of A restricted to ker D_A.
TEST(CharFunctionParameter, MatchesPartialIsometry) {
  Rng rng(84);
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = 2 + trial % 5;
    const Contraction a(random_cnu_contraction(d, 1 + trial % 2, rng));
    const DiskFunction phi = char_function(a);
    const CMatrix gamma = phi(0.0);
    const DefectBases db = defect_bases(gamma);
    const DiskFunction z = moebius_parameter(phi);

    const CMatrix p_ker = projector(kernel_basis(a.d_a()));
    const Contraction partial(a.a() * p_ker);
    const CMatrix& v = a.defect_space().basis();
    const CMatrix& w = a.defect_space_star().basis();
    const CMatrix left = db.space_star.basis().adjoint() * w.adjoint() *
                         partial.defect_space_star().basis();
    const CMatrix right = partial.defect_space().basis().adjoint() * v *
                          db.space.basis();
    EXPECT_LE(unitarity_residual(left), 1e-9);
    EXPECT_LE(unitarity_residual(right), 1e-9);
    for (Complex l : kGrid) {
      const CMatrix target = left *
                             char_function_value(partial.a(),
                                                 partial.defect_space().basis(),
                                                 partial.defect_space_star().basis(), l) *
                             right;
      EXPECT_LE(dist(z(l), target), 1e-8);
    }
  }
}

// Relations between the unreachable and unobservable parts of the systems
// nu, eta1 and eta2 built from contractions F, G and L.
struct Passive {
  DiscreteSystem nu, eta1, eta2;
  CMatrix f, g, d_f_star, d_g;
};

Passive passive_instance(Index l_dim, Index h, Index k_dim, int mode, Rng& rng) {
  const CMatrix f = random_contraction(h, l_dim, rng);
  const CMatrix g = random_contraction(k_dim, h, rng);
  const DefectBases df = defect_bases(f);
  const DefectBases dg = defect_bases(g);
  CMatrix l = zeros(df.space_star.dim(), dg.space.dim());
  if (mode == 1 && l.size() > 0) {
    l = ginibre(l.rows(), 1, rng) * ginibre(1, l.cols(), rng);
    l /= spectral_norm(l);
  } else if (mode == 2) {
    l = random_contraction(l.rows(), l.cols(), rng);
  }
  const CMatrix l_amb = df.space_star.basis() * l * dg.space.basis().adjoint();
  const CMatrix& dfs = df.d_star;
  const CMatrix& dgm = dg.d;
  const Index m = l_dim, n = k_dim;
  return Passive{
      DiscreteSystem(zeros(n, m), g, f, dfs * l_amb * dgm),
      DiscreteSystem(g * f, g * dfs, l_amb * dgm * f, l_amb * dgm * dfs),
      DiscreteSystem(g * f, g * dfs * l_amb, dgm * f, dgm * dfs * l_amb),
      f, g, dfs, dgm};
}

TEST(PassiveRelations, ComplementsOfReachableAndObservable) {
  Rng rng(85);
  for (int trial = 0; trial < 30; ++trial) {
    const Passive p = passive_instance(1, 3 + trial % 3, 1, trial % 3, rng);
    const Index h = p.f.rows();
    auto perp = [](const Subspace& s) { return orthogonal_complement(s); };
    const Subspace ker_fs = kernel_basis(p.f.adjoint());
    const Subspace ker_g = kernel_basis(p.g);
    const Subspace cnu = perp(controllable_subspace(p.nu));
    const Subspace onu = perp(observable_subspace(p.nu));
    EXPECT_LE(subspace_distance(cnu, subspace_intersect(
                                         perp(controllable_subspace(p.eta1)), ker_fs)),
              1e-8);
    EXPECT_LE(subspace_distance(onu, subspace_intersect(
                                         perp(observable_subspace(p.eta2)), ker_g)),
              1e-8);
    const CMatrix lhs_c = p.d_g * perp(controllable_subspace(p.eta2)).basis();
    EXPECT_LE(spectral_norm((identity(h) - projector(cnu)) * lhs_c), 1e-8);
    const CMatrix lhs_o = p.d_f_star * perp(observable_subspace(p.eta1)).basis();
    EXPECT_LE(spectral_norm((identity(h) - projector(onu)) * lhs_o), 1e-8);
  }
}

TEST(PassiveRelations, TransferOfEtaIsZnuOverLambda) {
  Rng rng(86);
  for (int trial = 0; trial < 10; ++trial) {
    const Passive p = passive_instance(2, 3, 2, 2, rng);
    EXPECT_TRUE(classify(p.eta1).passive);
    EXPECT_TRUE(classify(p.eta2).passive);
    for (Complex l : kGrid) {
      if (l == Complex(0.0)) continue;
      const CMatrix gam = transfer(p.nu, l) / l;
      EXPECT_LE(dist(transfer(p.eta1, l), gam), 1e-10);
      EXPECT_LE(dist(transfer(p.eta2, l), gam), 1e-10);
    }
  }
}

TEST(ChoiceSequence, ValidateRejectsBrokenChains) {
  ChoiceSequence s = scalar_sequence({0.4, 0.2}, false);
  EXPECT_NO_THROW(validate(s));
  s.doms.pop_back();
  EXPECT_EQ(code_of([&] { validate(s); }), ErrorCode::kInvalidSequence);
  ChoiceSequence t = scalar_sequence({0.4, 1.5}, false);
  EXPECT_EQ(code_of([&] { validate(t); }), ErrorCode::kInvalidSequence);
  ChoiceSequence u = scalar_sequence({0.4, 0.5}, true);
  EXPECT_EQ(code_of([&] { validate(u); }), ErrorCode::kInvalidSequence);
}

}  // namespace
}  // namespace schuriter
