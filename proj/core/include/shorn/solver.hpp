#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shorn/core.hpp"

namespace shorn::solver {

struct SolveConfig {
  double tol = kScaleTol;
  int max_outer_iterations = 0;  // 0 means 64 * ceil(log2 n)
  double strictness_margin = 1e-9;
  std::uint64_t rng_seed = 0;    // only instance generation consumes this
};

int iteration_budget(const SolveConfig& cfg, int n);

// Output of one local step: U with E(P U S U* P) = A P, the remainder
// (I-P) U S U* (I-P) still majorizes A(I-P), and U - I supported in Q.
// Q is a general projection in M (it contains spectral projections of S).
struct PartialSolution {
  Matrix u;
  DiagonalProjection p;
  Matrix q;
  double residual = 0.0;  // max |E(P U S U* P) - A P|
};

// Single crossing-point step.  A must be diagonal; A < S but not
// equimeasurable.
PartialSolution local_step(const HermitianOperator& a, const HermitianOperator& s,
                           const SolveConfig& cfg = {});

struct OrbitResult {
  Matrix u;         // product of local steps
  DiagonalProjection p;
  Matrix w;         // diagonalizes the remainder corner
  Matrix solution;  // w * u
  double residual = 0.0;  // max |diag(solution S solution*) - A|
  int iterations = 0;
  std::vector<double> tau_p_history;
  bool converged = true;
};

// Iterates local_step on the remaining corner until the remainder is
// equimeasurable to A there, then diagonalizes that corner.
OrbitResult solve_orbit(const HermitianOperator& a, const HermitianOperator& s,
                        const SolveConfig& cfg = {});

enum class StrictRoute { EqualGap, Window };
std::string to_string(StrictRoute r);

struct StrictStep {
  Matrix u;
  DiagonalProjection p;
  StrictRoute route = StrictRoute::Window;
  int cut_a = 0;  // grid index of the lower cut point
  int cut_b = 0;  // grid index of the upper cut point
  double residual = 0.0;
  bool remainder_strict = true;
};

// Solves at least half of a strictly majorized corner while keeping the
// remainder strictly majorized.  Needs n >= 8 so that 1/n <= 1/8.
StrictStep sh1part_step(const HermitianOperator& a, const HermitianOperator& s,
                        const SolveConfig& cfg = {});

// Two halves of size h each.  f_{S1} > f_{A1} pointwise, sigma(A1) >=
// sigma(A2) and S2 equimeasurable to A2.
struct StrictFrame {
  RealVector a1, a2;
  Matrix s1, s2;
  int h() const { return static_cast<int>(a1.size()); }
};

struct Sht2Result {
  Matrix u;
  DiagonalProjection r1;  // diagonal achieved here
  DiagonalProjection r2;  // strict scale gap survives here
  double residual = 0.0;
};

Sht2Result sht2_step(const StrictFrame& frame, double delta, const SolveConfig& cfg = {});

// P is the first p slots (A1, S1), I-P the rest (A2, S2 with S2 ~ A2).
struct EqmBlocks {
  RealVector a1, a2;
  Matrix s1, s2;
};

struct EqmResult {
  Matrix u;
  DiagonalProjection q;
  int k = 0;           // number of cascade stages
  double delta = 0.0;  // admissible trace loss per stage
  bool fast_path = false;
  double residual = 0.0;
};

EqmResult eqm_refine(const EqmBlocks& blocks, const SolveConfig& cfg = {});

struct ExactResult {
  Matrix u;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> tau_p_history;               // solved trace after each step
  std::vector<std::vector<double>> tail_history;   // per strict block: tau(I - P_k)
  int equal_slots = 0;
  int strict_blocks = 0;
  int equal_gap_steps = 0;
  int window_steps = 0;
  int orbit_finishes = 0;
};

// Finds U with E(U S U*) = A exactly (to tol) whenever A < S.
ExactResult solve_exact(const HermitianOperator& a, const HermitianOperator& s,
                        const SolveConfig& cfg = {});

struct CarpenterResult {
  Matrix projection;
  Matrix u;
  int rank = 0;
  double residual = 0.0;
  double idempotence = 0.0;  // ||P^2 - P||
};

// Projection with prescribed diagonal d, 0 <= d_i <= 1 and sum d integral.
CarpenterResult carpenter(std::span<const double> d, const SolveConfig& cfg = {});

}  // namespace shorn::solver
