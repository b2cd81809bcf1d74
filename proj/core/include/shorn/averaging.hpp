#pragma once

#include <span>

#include "shorn/core.hpp"

namespace shorn::averaging {

// A 2h x 2h corner split as P (first h slots) and I - P (last h slots).
// A1 is diagonal on P; S = S1 + S2 is block diagonal.
struct TwoBlockFrame {
  RealVector a1;
  Matrix s1;
  Matrix s2;
  int h() const { return static_cast<int>(a1.size()); }
};

struct AveragingResult {
  Matrix u;      // [[H, K], [-K, H]] with K = sqrt(I - H^2)
  Matrix x;      // P-corner of u S u*, its diagonal equals a1
  Matrix y;      // (I-P)-corner of u S u*
  RealVector h;  // diagonal of H
};

// Requires sigma(S1) >= sigma(A1) >= sigma(S2) within tol.
AveragingResult averaging_unitary(const TwoBlockFrame& frame, double tol = kScaleTol);

// Unitary V with V src = dst column by column that acts as the identity on
// the orthogonal complement of span(src, dst).  Columns of src and dst must
// be orthonormal sets of the same size.
struct Transport {
  Matrix v;
  Matrix support;  // projection onto span(src, dst)
};
Transport transport_unitary(const Matrix& src, const Matrix& dst, double tol = 1e-9);

// V with V mu_S(X_i) V* = mu_A(X_i) for each of the disjoint intervals X_i.
// Eigenvectors are matched rank by rank inside each snapped window.
Transport match_spectral_projections(const HermitianOperator& a, const HermitianOperator& s,
                                     std::span<const ScaleInterval> intervals);

}  // namespace shorn::averaging
