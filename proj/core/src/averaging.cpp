#include "shorn/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace shorn::averaging {

AveragingResult averaging_unitary(const TwoBlockFrame& frame, double tol) {
  const int h = frame.h();
  if (h == 0 || frame.s1.rows() != h || frame.s1.cols() != h || frame.s2.rows() != h ||
      frame.s2.cols() != h)
    fail(ErrorKind::ResolutionMismatch, "frame blocks must all have size h");

  const HermitianOperator s1(frame.s1), s2(frame.s2);
  const RealVector sig1 = spectral_decomposition(s1).values;
  const RealVector sig2 = spectral_decomposition(s2).values;
  if (sig1.minCoeff() < frame.a1.maxCoeff() - tol)
    fail(ErrorKind::Precondition, "domination fails: sigma(S1) does not dominate sigma(A1)");
  if (frame.a1.minCoeff() < sig2.maxCoeff() - tol)
    fail(ErrorKind::Precondition, "domination fails: sigma(A1) does not dominate sigma(S2)");

  const RealVector e1 = frame.s1.diagonal().real();
  const RealVector e2 = frame.s2.diagonal().real();
  RealVector hv(h), kv(h);
  for (int i = 0; i < h; ++i) {
    const double den = e1(i) - e2(i);
    double sq = 0.0;
    if (den > tol) {
      sq = (frame.a1(i) - e2(i)) / den;
      const double slop = tol / den;
      if (sq < -slop || sq > 1 + slop)
        fail(ErrorKind::Precondition, "averaging coefficient outside [0,1] at slot " + std::to_string(i));
      sq = std::clamp(sq, 0.0, 1.0);
    }
    hv(i) = std::sqrt(sq);
    kv(i) = std::sqrt(1.0 - sq);
  }

  AveragingResult out;
  out.h = hv;
  out.u = Matrix::Zero(2 * h, 2 * h);
  for (int i = 0; i < h; ++i) {
    out.u(i, i) = hv(i);
    out.u(i, h + i) = kv(i);
    out.u(h + i, i) = -kv(i);
    out.u(h + i, h + i) = hv(i);
  }
  Matrix s = Matrix::Zero(2 * h, 2 * h);
  s.topLeftCorner(h, h) = frame.s1;
  s.bottomRightCorner(h, h) = frame.s2;
  const Matrix t = conjugate(out.u, s);
  out.x = t.topLeftCorner(h, h);
  out.y = t.bottomRightCorner(h, h);
  return out;
}

namespace {

// Orthonormal vectors spanning the part of span(cand) orthogonal to span(base).
Matrix extend_basis(const Matrix& base, const Matrix& cand, double tol) {
  std::vector<Eigen::VectorXcd> extra;
  for (Eigen::Index c = 0; c < cand.cols(); ++c) {
    Eigen::VectorXcd v = cand.col(c);
    for (int pass = 0; pass < 2; ++pass) {
      if (base.cols() > 0) v -= base * (base.adjoint() * v);
      for (const auto& e : extra) v -= e * e.dot(v);
    }
    const double nv = v.norm();
    if (nv > tol) extra.push_back(v / nv);
  }
  Matrix out(cand.rows(), static_cast<Eigen::Index>(extra.size()));
  for (std::size_t i = 0; i < extra.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = extra[i];
  return out;
}

}  // namespace

Transport transport_unitary(const Matrix& src, const Matrix& dst, double tol) {
  if (src.rows() != dst.rows() || src.cols() != dst.cols())
    fail(ErrorKind::ResolutionMismatch, "source and destination frames differ in shape");
  const Eigen::Index n = src.rows();
  const Matrix id = Matrix::Identity(src.cols(), src.cols());
  if (max_abs(src.adjoint() * src - id) > tol || max_abs(dst.adjoint() * dst - id) > tol)
    fail(ErrorKind::InvalidInput, "transport frames must be orthonormal");

  const Matrix xs = extend_basis(src, dst, tol);
  const Matrix xd = extend_basis(dst, src, tol);
  if (xs.cols() != xd.cols())
    fail(ErrorKind::Infeasible, "transport spans have different numerical rank");

  Transport out;
  out.support = src * src.adjoint() + xs * xs.adjoint();
  out.v = dst * src.adjoint() + xd * xs.adjoint() + (Matrix::Identity(n, n) - out.support);
  return out;
}

Transport match_spectral_projections(const HermitianOperator& a, const HermitianOperator& s,
                                     std::span<const ScaleInterval> intervals) {
  if (a.n() != s.n()) fail(ErrorKind::ResolutionMismatch, "operands have different sizes");
  const int n = a.n();
  std::vector<RankWindow> wins;
  for (const ScaleInterval& x : intervals) wins.push_back(snap(x, n));
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  int total = 0;
  for (const RankWindow& w : wins)
    for (int k = w.first; k < w.last; ++k) {
      if (used[static_cast<std::size_t>(k)]) fail(ErrorKind::InvalidInput, "intervals overlap after snapping");
      used[static_cast<std::size_t>(k)] = true;
      ++total;
    }
  const SpectralDecomposition ea = spectral_decomposition(a);
  const SpectralDecomposition es = spectral_decomposition(s);
  Matrix src(n, total), dst(n, total);
  int c = 0;
  for (const RankWindow& w : wins)
    for (int k = w.first; k < w.last; ++k, ++c) {
      src.col(c) = es.vectors.col(k);
      dst.col(c) = ea.vectors.col(k);
    }
  return transport_unitary(src, dst);
}

}  // namespace shorn::averaging
