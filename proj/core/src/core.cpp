#include "shorn/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace shorn {

TraceContext::TraceContext(int n) : n_(n) {
  if (n <= 0) fail(ErrorKind::InvalidInput, "resolution must be positive");
}

double TraceContext::operator()(const Matrix& m) const {
  if (m.rows() != n_ || m.cols() != n_)
    fail(ErrorKind::ResolutionMismatch, "operator size differs from trace context");
  return m.diagonal().real().sum() / n_;
}

HermitianOperator::HermitianOperator(Matrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    fail(ErrorKind::InvalidInput, "operator must be a non-empty square matrix");
  if (!m_.allFinite()) fail(ErrorKind::InvalidInput, "operator has non-finite entries");
  const double scale = std::max(1.0, max_abs(m_));
  const double skew = max_abs(m_ - m_.adjoint());
  if (skew > tol * scale)
    fail(ErrorKind::InvalidInput,
         "operator is not hermitian (||A - A*|| = " + std::to_string(skew) + ")");
  // Symmetrize so downstream code sees an exactly hermitian matrix.
  m_ = (m_ + m_.adjoint()) / 2.0;
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()),
                          static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::diagonal(const RealVector& values) {
  return diagonal(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

HermitianOperator HermitianOperator::from_real(const Eigen::MatrixXd& m) {
  return HermitianOperator(Matrix(m.cast<Complex>()));
}

RealVector HermitianOperator::diagonal_values() const { return m_.diagonal().real(); }

bool HermitianOperator::is_diagonal(double tol) const {
  Matrix off = m_;
  off.diagonal().setZero();
  return max_abs(off) <= tol * std::max(1.0, max_abs(m_));
}

bool HermitianOperator::is_real() const { return m_.imag().cwiseAbs().maxCoeff() == 0.0; }

DiagonalProjection DiagonalProjection::from_slots(int n, std::span<const int> slots) {
  DiagonalProjection p(n);
  for (int s : slots) {
    if (s < 0 || s >= n) fail(ErrorKind::InvalidInput, "slot index out of range");
    p.insert(s);
  }
  return p;
}

int DiagonalProjection::rank() const {
  return static_cast<int>(std::count(mask_.begin(), mask_.end(), true));
}

std::vector<int> DiagonalProjection::slots() const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

std::vector<int> DiagonalProjection::complement_slots() const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i)
    if (!contains(i)) out.push_back(i);
  return out;
}

DiagonalProjection DiagonalProjection::complement() const {
  DiagonalProjection c(n());
  for (int i = 0; i < n(); ++i)
    if (!contains(i)) c.insert(i);
  return c;
}

Matrix DiagonalProjection::matrix() const {
  Matrix m = Matrix::Zero(n(), n());
  for (int i = 0; i < n(); ++i)
    if (contains(i)) m(i, i) = 1.0;
  return m;
}

double trace(const HermitianOperator& a) { return a.context()(a.matrix()); }

HermitianOperator pinch(const HermitianOperator& a) {
  return HermitianOperator::diagonal(a.diagonal_values());
}

namespace {

void canonicalize_phase(Matrix& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    const Complex z = v(arg, c);
    if (std::abs(z) > 0) v.col(c) *= std::conj(z) / std::abs(z);
  }
}

template <typename Solver>
SpectralDecomposition reorder(const Solver& es) {
  const RealVector& ev = es.eigenvalues();
  const Eigen::Index n = ev.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return ev(i) > ev(j); });
  SpectralDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = idx[static_cast<std::size_t>(k)];
    out.values(k) = ev(src);
    out.vectors.col(k) = es.eigenvectors().col(src).template cast<Complex>();
  }
  return out;
}

}  // namespace

SpectralDecomposition spectral_decomposition(const HermitianOperator& a) {
  SpectralDecomposition out;
  if (a.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix().real());
    if (es.info() != Eigen::Success) fail(ErrorKind::EigenFailure, "eigensolver did not converge");
    out = reorder(es);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    if (es.info() != Eigen::Success) fail(ErrorKind::EigenFailure, "eigensolver did not converge");
    out = reorder(es);
  }
  canonicalize_phase(out.vectors);
  return out;
}

bool equimeasurable(const HermitianOperator& a, const HermitianOperator& s, double tol) {
  if (a.n() != s.n()) fail(ErrorKind::ResolutionMismatch, "operands have different sizes");
  const RealVector fa = spectral_decomposition(a).values;
  const RealVector fs = spectral_decomposition(s).values;
  return (fa - fs).cwiseAbs().maxCoeff() <= tol;
}

RankWindow snap(ScaleInterval x, int n) {
  if (x.lo < -1e-12 || x.hi > 1 + 1e-12 || x.lo > x.hi)
    fail(ErrorKind::InvalidInput, "interval must satisfy 0 <= lo <= hi <= 1");
  constexpr double eps = 1e-12;
  RankWindow w;
  w.first = std::clamp(static_cast<int>(std::ceil(x.lo * n - eps)), 0, n);
  w.last = std::clamp(static_cast<int>(std::floor(x.hi * n + eps)), 0, n);
  return w;
}

Matrix spectral_projection(const HermitianOperator& a, ScaleInterval x) {
  const RankWindow w = snap(x, a.n());
  const SpectralDecomposition sd = spectral_decomposition(a);
  Matrix p = Matrix::Zero(a.n(), a.n());
  for (int k = w.first; k < w.last; ++k) p += sd.vectors.col(k) * sd.vectors.col(k).adjoint();
  return p;
}

Matrix corner(const Matrix& m, std::span<const int> slots) {
  const auto r = static_cast<Eigen::Index>(slots.size());
  Matrix c(r, r);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) c(i, j) = m(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(j)]);
  return c;
}

void apply_on_slots(Matrix& u, std::span<const int> slots, const Matrix& wc) {
  const auto r = static_cast<Eigen::Index>(slots.size());
  if (wc.rows() != r || wc.cols() != r)
    fail(ErrorKind::ResolutionMismatch, "corner unitary size differs from slot count");
  Matrix rows(r, u.cols());
  for (Eigen::Index i = 0; i < r; ++i) rows.row(i) = u.row(slots[static_cast<std::size_t>(i)]);
  const Matrix mixed = wc * rows;
  for (Eigen::Index i = 0; i < r; ++i) u.row(slots[static_cast<std::size_t>(i)]) = mixed.row(i);
}

Matrix conjugate(const Matrix& u, const Matrix& s) { return u * s * u.adjoint(); }

double unitarity_defect(const Matrix& u) {
  return max_abs(u * u.adjoint() - Matrix::Identity(u.rows(), u.cols()));
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double min_eigenvalue(const HermitianOperator& a) {
  return spectral_decomposition(a).values.minCoeff();
}

}  // namespace shorn
