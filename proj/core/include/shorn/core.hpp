#pragma once

// Finite model of the hyperfinite II_1 factor: n x n complex matrices with
// normalized trace Tr/n.  The masa is the diagonal subalgebra and the
// conditional expectation onto it is diagonal pinching.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

#include "shorn/error.hpp"

namespace shorn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kEigTol = 1e-10;
inline constexpr double kScaleTol = 1e-9;

class TraceContext {
 public:
  explicit TraceContext(int n);
  int resolution() const { return n_; }
  double operator()(const Matrix& m) const;
  double of_rank(int rank) const { return static_cast<double>(rank) / n_; }

 private:
  int n_;
};

class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Throws InvalidInput unless ||m - m*|| <= tol * max(1, ||m||).
  explicit HermitianOperator(Matrix m, double tol = kEigTol);

  static HermitianOperator diagonal(std::span<const double> values);
  static HermitianOperator diagonal(const RealVector& values);
  static HermitianOperator from_real(const Eigen::MatrixXd& m);

  int n() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  RealVector diagonal_values() const;
  bool is_diagonal(double tol = kEigTol) const;
  bool is_real() const;
  TraceContext context() const { return TraceContext(n()); }

 private:
  Matrix m_;
};

// Projection onto a set of coordinate slots; lives in the masa.
class DiagonalProjection {
 public:
  DiagonalProjection() = default;
  explicit DiagonalProjection(int n) : mask_(static_cast<std::size_t>(n), false) {}
  static DiagonalProjection from_slots(int n, std::span<const int> slots);

  int n() const { return static_cast<int>(mask_.size()); }
  bool contains(int i) const { return mask_[static_cast<std::size_t>(i)]; }
  void insert(int i) { mask_[static_cast<std::size_t>(i)] = true; }
  int rank() const;
  double trace() const { return n() == 0 ? 0.0 : static_cast<double>(rank()) / n(); }
  std::vector<int> slots() const;
  std::vector<int> complement_slots() const;
  DiagonalProjection complement() const;
  Matrix matrix() const;

 private:
  std::vector<bool> mask_;
};

double trace(const HermitianOperator& a);
HermitianOperator pinch(const HermitianOperator& a);

// Eigenvalues in non-increasing order, eigenvectors in matching columns.
// Ties keep the eigensolver's order.  Each eigenvector is rotated so that its
// largest entry is real and positive.
struct SpectralDecomposition {
  RealVector values;
  Matrix vectors;
};
SpectralDecomposition spectral_decomposition(const HermitianOperator& a);

bool equimeasurable(const HermitianOperator& a, const HermitianOperator& s,
                    double tol = kScaleTol);

// Half-open interval of [0,1] in scale coordinates.
struct ScaleInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// Rank window [first, last) obtained by snapping an interval inward to 1/n.
struct RankWindow {
  int first = 0;
  int last = 0;
  int size() const { return last > first ? last - first : 0; }
};
RankWindow snap(ScaleInterval x, int n);

// mu_A(X): spectral projection onto the eigenvectors of ranks inside X.
Matrix spectral_projection(const HermitianOperator& a, ScaleInterval x);

// Small helpers shared across modules.
Matrix corner(const Matrix& m, std::span<const int> slots);
// U <- W U where W acts as `wc` on `slots` and as the identity elsewhere.
void apply_on_slots(Matrix& u, std::span<const int> slots, const Matrix& wc);
Matrix conjugate(const Matrix& u, const Matrix& s);  // u s u*
double unitarity_defect(const Matrix& u);
double max_abs(const Matrix& m);
double min_eigenvalue(const HermitianOperator& a);

}  // namespace shorn
