#include <gtest/gtest.h>

#include "shorn/error.hpp"
#include "shorn/majorization.hpp"
#include "shorn/oracle.hpp"
#include "shorn/solver.hpp"
#include "support.hpp"

using namespace shorn;
using namespace shorn::oracle;
using majorization::Relation;

TEST(Rng, Deterministic) {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 10; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_NE(Rng(7).uniform(), c.uniform());
}

TEST(TTransform, HalfBlend) {
  RealVector d{{3.0, 1.0}};
  t_transform(d, 0, 1, 0.5);
  EXPECT_DOUBLE_EQ(d(0), 2.0);
  EXPECT_DOUBLE_EQ(d(1), 2.0);
}

TEST(Generate, NoTransformsIsEquimeasurable) {
  const InstanceSpec s = generate_instance(6, 3, 0);
  EXPECT_EQ(s.transforms, 0);
  EXPECT_EQ(majorization::classify(HermitianOperator::diagonal(s.target_diagonal),
                                   HermitianOperator::diagonal(s.eigenvalues))
                .relation,
            Relation::Equimeasurable);
}

TEST(Generate, SameSeedSameInstance) {
  const InstanceSpec a = generate_instance(9, 77), b = generate_instance(9, 77);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.target_diagonal, b.target_diagonal);
  EXPECT_EQ(a.transforms, 18);
}

TEST(Generate, NeverNoneAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const InstanceSpec s = generate_instance(16, seed, 50);
    const auto rep = majorization::classify(HermitianOperator::diagonal(s.target_diagonal),
                                            HermitianOperator::diagonal(s.eigenvalues));
    ASSERT_TRUE(rep.majorized()) << "seed " << seed;
    ASSERT_TRUE(classically_majorized(s.eigenvalues, s.target_diagonal));
    for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i) ASSERT_GE(s.eigenvalues(i - 1), s.eigenvalues(i));
  }
}

TEST(Classical, TwoByTwo) {
  const Eigen::MatrixXd m = classical_construct(RealVector{{3.0, 1.0}}, RealVector{{2.0, 2.0}});
  EXPECT_NEAR(m(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(m(1, 1), 2.0, 1e-14);
  EXPECT_NEAR(std::abs(m(0, 1)), 1.0, 1e-14);
  EXPECT_NEAR(m(0, 1), m(1, 0), 1e-15);
}

TEST(Classical, SortedTargetGivesDiagonal) {
  const RealVector l{{5.0, 3.0, 3.0, 1.0}};
  const Eigen::MatrixXd m = classical_construct(l, l);
  EXPECT_LE((m - Eigen::MatrixXd(l.asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Classical, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int n = 1 + static_cast<int>(seed % 64);
    const InstanceSpec s = generate_instance(n, seed);
    const Eigen::MatrixXd m = classical_construct(s.eigenvalues, s.target_diagonal);
    EXPECT_LE((m.diagonal() - s.target_diagonal).cwiseAbs().maxCoeff(), 1e-9) << "seed " << seed;
    EXPECT_LE((shorn::testing::reference_eigenvalues(m.cast<Complex>()) - s.eigenvalues).cwiseAbs().maxCoeff(), 1e-9)
        << "seed " << seed;
    EXPECT_LE((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Classical, RejectsNonMajorized) {
  try {
    classical_construct(RealVector{{3.0, 1.0}}, RealVector{{4.0, 0.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotMajorized);
  }
}

TEST(Classically, PartialSums) {
  EXPECT_TRUE(classically_majorized(RealVector{{3.0, 1.0}}, RealVector{{2.0, 2.0}}));
  EXPECT_FALSE(classically_majorized(RealVector{{3.0, 1.0}}, RealVector{{4.0, 0.0}}));
  EXPECT_FALSE(classically_majorized(RealVector{{3.0, 1.0}}, RealVector{{1.0, 1.0}}));
}

TEST(CheckPartialSolution, LocalStepPasses) {
  const HermitianOperator a = HermitianOperator::diagonal(RealVector{{2.0, 1.0, 1.0}});
  const HermitianOperator s = HermitianOperator::diagonal(RealVector{{3.0, 1.0, 0.0}});
  EXPECT_TRUE(check_partial_solution(a, s, solver::local_step(a, s)).ok());
}

TEST(CheckPartialSolution, CorruptedUnitaryFails) {
  const HermitianOperator a = HermitianOperator::diagonal(RealVector{{2.0, 1.0, 1.0}});
  const HermitianOperator s = HermitianOperator::diagonal(RealVector{{3.0, 1.0, 0.0}});
  solver::PartialSolution ps = solver::local_step(a, s);
  ps.u(0, 0) += 1e-3;
  const PartialSolutionReport rep = check_partial_solution(a, s, ps);
  EXPECT_FALSE(rep.ok());
  EXPECT_TRUE(!rep.at("unitarity").passed || !rep.at("diagonal").passed);
}

TEST(CheckPartialSolution, EmptyCornerIsVacuous) {
  const HermitianOperator a = HermitianOperator::diagonal(RealVector{{2.0, 1.0, 1.0}});
  const HermitianOperator s = HermitianOperator::diagonal(RealVector{{3.0, 1.0, 0.0}});
  solver::PartialSolution ps;
  ps.u = Matrix::Identity(3, 3);
  ps.p = DiagonalProjection(3);
  ps.q = Matrix::Zero(3, 3);
  EXPECT_TRUE(check_partial_solution(a, s, ps).ok());
}

TEST(CrossValidation, ExactSolverAgreesWithClassical) {
  Rng rng(91);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 1 + static_cast<int>(seed % 24);
    InstanceSpec spec = generate_instance(n, seed);
    if (seed % 4 == 3) std::swap(spec.eigenvalues, spec.target_diagonal);  // usually infeasible
    const bool feasible = classically_majorized(spec.eigenvalues, spec.target_diagonal);
    bool classical_ok = true, exact_ok = true;
    Eigen::MatrixXd m;
    solver::ExactResult r;
    const HermitianOperator s = rotated(spec.eigenvalues, rng);
    try {
      m = classical_construct(spec.eigenvalues, spec.target_diagonal);
    } catch (const Error&) {
      classical_ok = false;
    }
    try {
      r = solver::solve_exact(HermitianOperator::diagonal(spec.target_diagonal), s);
    } catch (const Error&) {
      exact_ok = false;
    }
    EXPECT_EQ(classical_ok, feasible) << "seed " << seed;
    EXPECT_EQ(exact_ok, feasible) << "seed " << seed;
    if (!feasible) continue;
    const Matrix t = conjugate(r.u, s.matrix());
    EXPECT_LE((shorn::testing::reference_eigenvalues(t) - shorn::testing::reference_eigenvalues(m.cast<Complex>()))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-8);
    EXPECT_LE((t.diagonal().real() - m.diagonal()).cwiseAbs().maxCoeff(), 1e-8);
  }
}
