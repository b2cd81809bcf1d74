#pragma once

#include <span>
#include <string>
#include <vector>

#include "shorn/core.hpp"

namespace shorn::majorization {

// Non-increasing step function on [0,1) with n steps of width 1/n.
struct SpectralScale {
  RealVector values;
  int n() const { return static_cast<int>(values.size()); }
  double at(double t) const;
};

// Samples of F(x) = integral of f over [0,x] at x = k/n, k = 0..n.
struct KyFanCurve {
  RealVector samples;
  int n() const { return static_cast<int>(samples.size()) - 1; }
};

enum class Relation { Exact, Strict, Weak, None, Equimeasurable };
std::string to_string(Relation r);
Relation relation_from_string(const std::string& s);

struct MajorizationReport {
  Relation relation = Relation::None;
  RealVector gap;  // F_S - F_A on the n+1 grid points
  double slack = 0.0;
  double trace_gap = 0.0;  // tau(S) - tau(A)
  bool majorized() const {
    return relation == Relation::Exact || relation == Relation::Strict ||
           relation == Relation::Equimeasurable;
  }
};

SpectralScale spectral_scale(const HermitianOperator& a);
SpectralScale scale_from_values(std::span<const double> values);
SpectralScale scale_from_values(const RealVector& values);
KyFanCurve ky_fan(const SpectralScale& f);

MajorizationReport classify(const HermitianOperator& a, const HermitianOperator& s,
                            double tol = kScaleTol);
MajorizationReport classify(const SpectralScale& fa, const SpectralScale& fs,
                            double tol = kScaleTol);

double slack(const HermitianOperator& a, const HermitianOperator& s);
double slack(const SpectralScale& fa, const SpectralScale& fs);

// One block of a commuting decomposition; weight is tau(P_m) = size / total.
struct Block {
  HermitianOperator a;
  HermitianOperator s;
};

// Slack of the assembled pair computed block by block.  Blocks must be
// spectrally ordered: every eigenvalue of block m dominates every eigenvalue
// of block m+1, separately for the A side and the S side.
double slack_block_formula(std::span<const Block> blocks, double tol = kScaleTol);

// Assembles block-diagonal operators from blocks (in order).
HermitianOperator assemble(std::span<const HermitianOperator> blocks);

// Three-block decomposition I = P + Q + R with a replacement T for S_2.
struct BlockReplacement {
  HermitianOperator a1, a2, a3;
  HermitianOperator s1, s2, s3;
  HermitianOperator t;
};

struct BlockReplacementCheck {
  std::vector<std::string> violations;  // empty iff every hypothesis holds
  bool majorized = false;               // A < R on the assembled operators
  bool input_strict = false;            // F_S - F_A > 0 on (0,1)
  bool replaced_strict = false;         // F_R - F_A > 0 on (0,1)
  bool ok() const { return violations.empty(); }
};

BlockReplacementCheck verify_block_majorization(const BlockReplacement& d,
                                                double tol = kScaleTol);

}  // namespace shorn::majorization
