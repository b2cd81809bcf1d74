#pragma once

#include <vector>

#include "shorn/core.hpp"
#include "shorn/solver.hpp"

namespace shorn::solver::detail {

// Diagonal of a diagonal positive target; throws otherwise.
RealVector target_values(const HermitianOperator& a, double tol);

// Slots sorted by value, largest first; ties by slot index.
std::vector<int> rank_slots(const RealVector& values);

// V with V v_k = e_{slots[k]}: sends the k-th eigenvector to slots[k].
Matrix align_eigenvectors(const Matrix& vectors, const std::vector<int>& slots);

RealVector gather(const RealVector& v, const std::vector<int>& slots);

double diagonal_residual(const Matrix& t, const RealVector& a, const std::vector<int>& slots);

}  // namespace shorn::solver::detail
