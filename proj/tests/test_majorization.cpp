#include <gtest/gtest.h>

#include <numeric>

#include "shorn/error.hpp"
#include "shorn/majorization.hpp"
#include "shorn/oracle.hpp"
#include "support.hpp"

using namespace shorn;
using namespace shorn::majorization;

namespace {

HermitianOperator diag(std::initializer_list<double> v) {
  RealVector x(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), x.data());
  return HermitianOperator::diagonal(x);
}

RealVector uniform_values(int n, double lo, double hi, oracle::Rng& rng) {
  RealVector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

// Brute-force slack: partial sums of sorted eigenvalues, no library curves.
double brute_slack(const HermitianOperator& a, const HermitianOperator& s) {
  const RealVector x = shorn::testing::reference_eigenvalues(a.matrix());
  const RealVector y = shorn::testing::reference_eigenvalues(s.matrix());
  double best = 0, fx = 0, fy = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    fx += x(i);
    fy += y(i);
    best = std::min(best, (fy - fx) / static_cast<double>(x.size()));
  }
  return best;
}

}  // namespace

TEST(Scale, Identity) {
  const SpectralScale f = spectral_scale(HermitianOperator(Matrix::Identity(3, 3)));
  EXPECT_NEAR((f.values.array() - 1.0).abs().maxCoeff(), 0.0, 1e-15);
}

TEST(Scale, SortedDiagonal) {
  const SpectralScale f = spectral_scale(diag({1, 3}));
  EXPECT_DOUBLE_EQ(f.values(0), 3.0);
  EXPECT_DOUBLE_EQ(f.values(1), 1.0);
  EXPECT_DOUBLE_EQ(f.at(0.0), 3.0);
  EXPECT_DOUBLE_EQ(f.at(0.5), 1.0);
}

TEST(Scale, MomentIdentity) {
  oracle::Rng rng(31);
  const HermitianOperator a = oracle::random_psd(16, rng);
  const SpectralScale f = spectral_scale(a);
  for (int k = 1; k <= 3; ++k) {
    Matrix p = Matrix::Identity(16, 16);
    for (int j = 0; j < k; ++j) p = p * a.matrix();
    EXPECT_NEAR(f.values.array().pow(k).mean(), p.trace().real() / 16.0, 1e-9 * std::pow(f.values(0), k));
  }
}

TEST(KyFan, ConstantScale) {
  const KyFanCurve c = ky_fan(scale_from_values(RealVector::Ones(2)));
  EXPECT_DOUBLE_EQ(c.samples(0), 0.0);
  EXPECT_DOUBLE_EQ(c.samples(1), 0.5);
  EXPECT_DOUBLE_EQ(c.samples(2), 1.0);
}

TEST(KyFan, TwoSteps) {
  const KyFanCurve c = ky_fan(scale_from_values(RealVector{{3.0, 1.0}}));
  EXPECT_DOUBLE_EQ(c.samples(1), 1.5);
  EXPECT_DOUBLE_EQ(c.samples(2), 2.0);
}

TEST(KyFan, ThreeSteps) {
  const KyFanCurve c = ky_fan(scale_from_values(RealVector{{3.0, 1.0, 0.0}}));
  EXPECT_DOUBLE_EQ(c.samples(0), 0.0);
  EXPECT_DOUBLE_EQ(c.samples(1), 1.0);
  EXPECT_NEAR(c.samples(2), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.samples(3), 4.0 / 3.0, 1e-15);
}

TEST(KyFan, ConcaveEndsAtTrace) {
  oracle::Rng rng(32);
  const HermitianOperator a = oracle::random_psd(10, rng);
  const KyFanCurve c = ky_fan(spectral_scale(a));
  EXPECT_EQ(c.n(), 10);
  EXPECT_NEAR(c.samples(10), trace(a), 1e-12);
  for (int k = 2; k <= 10; ++k)
    EXPECT_LE(c.samples(k) - c.samples(k - 1), c.samples(k - 1) - c.samples(k - 2) + 1e-15);
}

TEST(Classify, StrictExample) {
  const MajorizationReport r = classify(diag({2, 1, 1}), diag({3, 1, 0}));
  EXPECT_EQ(r.relation, Relation::Strict);
  ASSERT_EQ(r.gap.size(), 4);
  EXPECT_NEAR(r.gap(1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.gap(2), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.trace_gap, 0.0, 1e-15);
  EXPECT_NEAR(r.slack, 0.0, 1e-15);
}

TEST(Classify, Reflexive) {
  oracle::Rng rng(33);
  const HermitianOperator s = oracle::random_psd(6, rng);
  EXPECT_EQ(classify(s, s).relation, Relation::Equimeasurable);
}

TEST(Classify, ExactWhenGapTouchesZero) {
  EXPECT_EQ(classify(diag({3, 1, 1, 1}), diag({3, 2, 0, 1})).relation, Relation::Exact);
}

TEST(Classify, WeakAndNone) {
  EXPECT_EQ(classify(diag({1, 1}), diag({3, 1})).relation, Relation::Weak);
  EXPECT_EQ(classify(diag({4, 0}), diag({3, 1})).relation, Relation::None);
}

TEST(Classify, RejectsNegativeSpectrum) {
  EXPECT_THROW(classify(diag({1, -1}), diag({0, 0})), Error);
}

TEST(Classify, ResolutionMismatch) {
  try {
    classify(diag({1, 1}), diag({2, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResolutionMismatch);
  }
}

TEST(Classify, PinchedRandomNeverNone) {
  oracle::Rng rng(34);
  for (int rep = 0; rep < 100; ++rep) {
    const HermitianOperator s = oracle::random_psd(8, rng);
    const MajorizationReport r = classify(pinch(s), s);
    EXPECT_TRUE(r.majorized());
    EXPECT_LE(std::abs(r.trace_gap), 1e-10);
  }
}

TEST(Classify, RelationNamesRoundTrip) {
  for (Relation r : {Relation::Exact, Relation::Strict, Relation::Weak, Relation::None, Relation::Equimeasurable})
    EXPECT_EQ(relation_from_string(to_string(r)), r);
}

TEST(Slack, Examples) {
  EXPECT_DOUBLE_EQ(slack(diag({2, 1, 1}), diag({2, 1, 1})), 0.0);
  EXPECT_NEAR(slack(diag({2, 1, 1}), diag({3, 1, 0})), 0.0, 1e-15);
  EXPECT_NEAR(slack(diag({3, 0}), diag({1, 1})), -1.0, 1e-15);
}

TEST(Slack, MatchesBruteForceAndLowerBound) {
  oracle::Rng rng(35);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + rng.index(20);
    const HermitianOperator a = oracle::random_psd(n, rng), s = oracle::random_psd(n, rng);
    const double l = slack(a, s);
    EXPECT_NEAR(l, brute_slack(a, s), 1e-10);
    EXPECT_GE(l, -trace(a) - 1e-12);
  }
}

TEST(Slack, Superadditive) {
  oracle::Rng rng(36);
  for (int rep = 0; rep < 200; ++rep) {
    const int k = 1 + rng.index(4);
    std::vector<HermitianOperator> as, ss;
    int n = 0;
    double weighted = 0;
    std::vector<std::pair<int, double>> parts;
    for (int m = 0; m < k; ++m) {
      const int nm = 1 + rng.index(6);
      as.push_back(oracle::random_psd(nm, rng));
      ss.push_back(oracle::random_psd(nm, rng));
      parts.emplace_back(nm, slack(as.back(), ss.back()));
      n += nm;
    }
    for (const auto& [nm, l] : parts) weighted += static_cast<double>(nm) / n * l;
    EXPECT_GE(slack(assemble(as), assemble(ss)), weighted - 1e-10);
  }
}

TEST(SlackBlockFormula, SingleBlock) {
  const std::vector<Block> b{{diag({2, 1, 1}), diag({3, 1, 0})}};
  EXPECT_NEAR(slack_block_formula(b), slack(diag({2, 1, 1}), diag({3, 1, 0})), 1e-15);
}

TEST(SlackBlockFormula, TwoScalarBlocks) {
  const std::vector<Block> b{{diag({3}), diag({4})}, {diag({1}), diag({0})}};
  EXPECT_NEAR(slack_block_formula(b), slack(diag({3, 1}), diag({4, 0})), 1e-15);
}

TEST(SlackBlockFormula, RandomOrderedBlocks) {
  oracle::Rng rng(37);
  for (int rep = 0; rep < 200; ++rep) {
    const int k = 1 + rng.index(4);
    const int n = rep == 0 ? 12 : k + rng.index(16);
    // Cut sorted value lists into contiguous blocks at shared positions.
    RealVector av = shorn::testing::sorted_desc(uniform_values(n, 0, 5, rng));
    RealVector sv = shorn::testing::sorted_desc(uniform_values(n, 0, 5, rng));
    std::vector<int> cuts{0};
    for (int m = 1; m < k; ++m) cuts.push_back(m * n / k);
    cuts.push_back(n);
    std::vector<Block> blocks;
    std::vector<HermitianOperator> ab, sb;
    for (int m = 0; m < k; ++m) {
      const int lo = cuts[static_cast<std::size_t>(m)], len = cuts[static_cast<std::size_t>(m) + 1] - lo;
      const RealVector aseg = av.segment(lo, len), sseg = sv.segment(lo, len);
      blocks.push_back({oracle::rotated(aseg, rng), oracle::rotated(sseg, rng)});
      ab.push_back(blocks.back().a);
      sb.push_back(blocks.back().s);
    }
    EXPECT_NEAR(slack_block_formula(blocks), slack(assemble(ab), assemble(sb)), 1e-10);
  }
}

TEST(SlackBlockFormula, RejectsUnordered) {
  const std::vector<Block> b{{diag({1}), diag({4})}, {diag({3}), diag({0})}};
  try {
    slack_block_formula(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
}

namespace {

BlockReplacement replacement_instance(oracle::Rng& rng, double s1_lift) {
  const RealVector a1 = uniform_values(4, 5, 6, rng), a2 = uniform_values(4, 3, 4, rng),
                   a3 = uniform_values(4, 2.1, 2.9, rng);
  BlockReplacement d;
  d.a1 = HermitianOperator::diagonal(a1);
  d.a2 = HermitianOperator::diagonal(a2);
  d.a3 = HermitianOperator::diagonal(a3);
  d.s1 = oracle::rotated((a1.array() + s1_lift).matrix(), rng);
  d.s2 = oracle::rotated(a2, rng);
  d.s3 = oracle::rotated((a3.array() - s1_lift).matrix(), rng);
  RealVector t = a2;
  const double bump = rng.uniform(-0.5, 0.5);
  t(0) += bump;
  t(1) -= bump;
  d.t = oracle::rotated(t, rng);
  return d;
}

}  // namespace

TEST(BlockReplacement, IdentityReplacement) {
  oracle::Rng rng(38);
  BlockReplacement d = replacement_instance(rng, 2.0);
  d.t = d.s2;
  const BlockReplacementCheck c = verify_block_majorization(d);
  EXPECT_TRUE(c.ok());
  EXPECT_TRUE(c.majorized);
}

TEST(BlockReplacement, HypothesisTwoGate) {
  oracle::Rng rng(39);
  const BlockReplacementCheck c = verify_block_majorization(replacement_instance(rng, 0.5));
  ASSERT_FALSE(c.ok());
  EXPECT_NE(c.violations.front().find("gap: "), std::string::npos);
  EXPECT_FALSE(c.majorized);
}

TEST(BlockReplacement, RandomAgreesWithClassify) {
  oracle::Rng rng(40);
  for (int rep = 0; rep < 50; ++rep) {
    const BlockReplacement d = replacement_instance(rng, 2.0);
    const BlockReplacementCheck c = verify_block_majorization(d);
    ASSERT_TRUE(c.ok()) << c.violations.front();
    const std::vector<HermitianOperator> av{d.a1, d.a2, d.a3}, rv{d.s1, d.t, d.s3};
    EXPECT_TRUE(c.majorized);
    EXPECT_EQ(c.majorized, classify(assemble(av), assemble(rv)).majorized());
    if (c.input_strict) EXPECT_TRUE(c.replaced_strict);
  }
}

TEST(Properties, DilationConsistency) {
  oracle::Rng rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + rng.index(12);
    const RealVector v = uniform_values(n, 0, 3, rng);
    RealVector w(2 * n);
    for (int i = 0; i < n; ++i) w(2 * i) = w(2 * i + 1) = v(i);
    const SpectralScale f = scale_from_values(v), g = scale_from_values(w);
    const KyFanCurve cf = ky_fan(f), cg = ky_fan(g);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(f.values(i), g.values(2 * i));
      EXPECT_EQ(f.values(i), g.values(2 * i + 1));
      EXPECT_NEAR(cf.samples(i + 1), cg.samples(2 * i + 2), 1e-14);
    }
  }
}

TEST(Properties, Transitivity) {
  oracle::Rng rng(42);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + rng.index(12);
    const HermitianOperator c = oracle::random_psd(n, rng);
    const Matrix u = oracle::random_unitary(n, rng);
    const HermitianOperator b = pinch(c);
    const HermitianOperator a = pinch(HermitianOperator(conjugate(u, b.matrix()), 1e-9));
    ASSERT_TRUE(classify(a, b).majorized());
    ASSERT_TRUE(classify(b, c).majorized());
    EXPECT_NE(classify(a, c).relation, Relation::None);
  }
}
