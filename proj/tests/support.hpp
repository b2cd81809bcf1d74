#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "shorn/core.hpp"

namespace shorn::testing {

// Eigenvalues from Eigen's own solver, sorted descending.  Kept apart from
// spectral_decomposition so tests have an independent reference.
inline RealVector reference_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  RealVector v = es.eigenvalues();
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

inline double diagonal_error(const Matrix& u, const Matrix& s, const RealVector& a) {
  const Matrix t = u * s * u.adjoint();
  return (t.diagonal().real() - a).cwiseAbs().maxCoeff();
}

inline double spectrum_error(const Matrix& u, const Matrix& s) {
  return (reference_eigenvalues(u * s * u.adjoint()) - reference_eigenvalues(s)).cwiseAbs().maxCoeff();
}

inline RealVector sorted_desc(RealVector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

// Partial sums of sorted lists, the textbook majorization test.
inline bool list_majorized(const RealVector& d, const RealVector& lambda, double tol) {
  const RealVector x = sorted_desc(d), y = sorted_desc(lambda);
  double sx = 0, sy = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sx += x(i);
    sy += y(i);
    if (sx > sy + tol) return false;
  }
  return std::abs(sx - sy) <= tol;
}

}  // namespace shorn::testing
