#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "shorn/core.hpp"
#include "shorn/solver.hpp"

namespace shorn::oracle {

// mt19937_64 words mapped to doubles by hand; distribution objects are
// implementation-defined, the raw engine is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  int index(int n);                       // [0, n)
  double normal();

 private:
  std::mt19937_64 eng_;
  std::uint64_t next() { return eng_(); }
};

struct InstanceSpec {
  int n = 0;
  RealVector eigenvalues;      // non-increasing
  RealVector target_diagonal;  // majorized by eigenvalues
  std::uint64_t seed = 0;
  int transforms = 0;
};

// (d_i, d_j) <- (t d_i + (1-t) d_j, (1-t) d_i + t d_j)
void t_transform(RealVector& d, int i, int j, double blend);

// Random spectrum in [1/2, 10), then a shuffle and `transforms` random
// T-transforms; transforms < 0 means 2n.
InstanceSpec generate_instance(int n, std::uint64_t seed, int transforms = -1);

Matrix random_unitary(int n, Rng& rng, bool real = false);
HermitianOperator random_psd(int n, Rng& rng, bool real = false);
// Operator with the given spectrum in a random basis.
HermitianOperator rotated(const RealVector& spectrum, Rng& rng, bool real = false);

bool classically_majorized(const RealVector& lambda, const RealVector& d, double tol = kScaleTol);

// Real symmetric matrix with spectrum lambda and diagonal d built by a chain
// of Givens rotations, always placing the largest outstanding diagonal value.
Eigen::MatrixXd classical_construct(const RealVector& lambda, const RealVector& d, double tol = kScaleTol);

struct InvariantCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct PartialSolutionReport {
  std::vector<InvariantCheck> checks;
  bool ok() const;
  const InvariantCheck& at(const std::string& name) const;
};

// Recomputes the invariants of a partial solution from scratch.
PartialSolutionReport check_partial_solution(const HermitianOperator& a, const HermitianOperator& s,
                                             const solver::PartialSolution& ps, double tol = 1e-9);

}  // namespace shorn::oracle
