#pragma once

#include <span>
#include <vector>

#include "shorn/core.hpp"
#include "shorn/solver.hpp"

namespace shorn::choquet {

struct Atom {
  double value = 0.0;
  double mass = 0.0;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
  double mass() const;
  double first_moment() const;
  double mean() const { return first_moment() / mass(); }
};

struct TargetPart {
  double mass = 0.0;
  double mean = 0.0;
};

// Distribution of eigenvalues of S, one atom of mass 1/n per eigenvalue.
AtomicMeasure spectral_measure(const HermitianOperator& s);

// Ky Fan comparison of the quantile functions of two measures of equal mass.
bool measure_majorized(const AtomicMeasure& lower, const AtomicMeasure& upper, double tol = kScaleTol);

// Splits mu into sub-measures nu_j with mass_j and mean_j and sum nu_j = mu.
// Parts are filled in order of decreasing mean; each takes the highest
// window of the remaining quantile function that has the required mean.
// Result order follows `targets`; atoms follow the order of mu.
std::vector<AtomicMeasure> measure_split(const AtomicMeasure& mu, std::span<const TargetPart> targets,
                                         double tol = kScaleTol);

// Same split as a matrix of masses: row j is part j, column i is atom i of mu.
Eigen::MatrixXd split_masses(const AtomicMeasure& mu, std::span<const TargetPart> targets,
                             double tol = kScaleTol);

struct FiniteSpectrumResult {
  Matrix u;               // acts on the refined space of size n * refinement
  int refinement = 1;
  RealVector target;      // A tensor I_m as a diagonal
  Matrix source;          // S tensor I_m
  double residual = 0.0;  // max |diag(u S' u*) - A'|
  int levels = 0;
  std::vector<AtomicMeasure> parts;
};

// A diagonal with finitely many distinct values.  Splits the spectral
// distribution of S by level, refines S to S tensor I_m when the split has
// fractional atoms, and solves each level block with solve_exact.
FiniteSpectrumResult finite_spectrum_solve(const HermitianOperator& a, const HermitianOperator& s,
                                           const solver::SolveConfig& cfg = {}, int refine_cap = 64);

}  // namespace shorn::choquet
