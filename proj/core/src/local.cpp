#include <algorithm>
#include <cmath>
#include <numeric>

#include "shorn/averaging.hpp"
#include "shorn/majorization.hpp"
#include "solver_detail.hpp"

namespace shorn::solver {

namespace detail {

RealVector target_values(const HermitianOperator& a, double tol) {
  if (!a.is_diagonal(tol)) fail(ErrorKind::InvalidInput, "target A must be diagonal");
  RealVector v = a.diagonal_values();
  if (v.minCoeff() < -kEigTol * std::max(1.0, v.cwiseAbs().maxCoeff()))
    fail(ErrorKind::InvalidInput, "target A must be positive");
  return v;
}

std::vector<int> rank_slots(const RealVector& values) {
  std::vector<int> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return values(i) > values(j); });
  return idx;
}

Matrix align_eigenvectors(const Matrix& vectors, const std::vector<int>& slots) {
  Matrix v(vectors.rows(), vectors.cols());
  for (std::size_t k = 0; k < slots.size(); ++k)
    v.row(slots[k]) = vectors.col(static_cast<Eigen::Index>(k)).adjoint();
  return v;
}

RealVector gather(const RealVector& v, const std::vector<int>& slots) {
  RealVector out(static_cast<Eigen::Index>(slots.size()));
  for (std::size_t i = 0; i < slots.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(slots[i]);
  return out;
}

double diagonal_residual(const Matrix& t, const RealVector& a, const std::vector<int>& slots) {
  double r = 0.0;
  for (int s : slots) r = std::max(r, std::abs(t(s, s).real() - a(s)));
  return r;
}

}  // namespace detail

int iteration_budget(const SolveConfig& cfg, int n) {
  if (cfg.max_outer_iterations > 0) return cfg.max_outer_iterations;
  const int lg = n <= 1 ? 1 : static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
  return 64 * std::max(1, lg);
}

namespace {

using namespace detail;
namespace mj = shorn::majorization;

struct Crossing {
  std::vector<int> x;  // ranks in I just before the crossing point
  std::vector<int> y;  // ranks in J just after it
};

// X = I-ranks among the m complement positions ending at j, Y = J-ranks among
// the m positions after j; both trimmed to a common size nearest the crossing.
Crossing window_at(const std::vector<int>& comp, const RealVector& d, std::size_t j, int m) {
  Crossing c;
  for (int t = 0; t < m && static_cast<int>(j) - t >= 0; ++t) {
    const int k = comp[j - static_cast<std::size_t>(t)];
    if (d(k) > 0) c.x.push_back(k);
  }
  for (int t = 1; t <= m && j + static_cast<std::size_t>(t) < comp.size(); ++t) {
    const int k = comp[j + static_cast<std::size_t>(t)];
    if (d(k) < 0) c.y.push_back(k);
  }
  const std::size_t size = std::min(c.x.size(), c.y.size());
  c.x.resize(size);
  c.y.resize(size);
  std::sort(c.x.begin(), c.x.end());
  std::sort(c.y.begin(), c.y.end());
  return c;
}

// Levels L1 > L2 >= L3 > L4 between the four spectral windows.
bool levels_ok(const Crossing& c, const RealVector& s, const RealVector& a, double tol) {
  if (c.x.empty()) return false;
  double l1 = INFINITY, l2 = -INFINITY, l2lo = INFINITY, l3 = -INFINITY, l3lo = INFINITY, l4 = -INFINITY;
  for (int k : c.x) {
    l1 = std::min(l1, s(k));
    l2 = std::max(l2, a(k));
    l2lo = std::min(l2lo, a(k));
  }
  for (int k : c.y) {
    l3 = std::max(l3, a(k));
    l3lo = std::min(l3lo, a(k));
    l4 = std::max(l4, s(k));
  }
  return l1 > l2 + tol && l2lo >= l3 - tol && l3lo > l4 + tol;
}

}  // namespace

PartialSolution local_step(const HermitianOperator& a_op, const HermitianOperator& s_op,
                           const SolveConfig& cfg) {
  const double tol = cfg.tol;
  const RealVector a = target_values(a_op, tol);
  const int n = a_op.n();
  if (s_op.n() != n) fail(ErrorKind::ResolutionMismatch, "A and S have different sizes");

  const SpectralDecomposition es = spectral_decomposition(s_op);
  const std::vector<int> order = rank_slots(a);
  const RealVector av = gather(a, order);
  const mj::MajorizationReport rep = mj::classify(mj::scale_from_values(av), mj::SpectralScale{es.values}, tol);
  if (rep.relation == mj::Relation::Equimeasurable)
    fail(ErrorKind::Precondition, "A and S are equimeasurable; there is no crossing point");
  if (!rep.majorized()) fail(ErrorKind::NotMajorized, "A is not majorized by S");

  const RealVector d = es.values - av;
  std::vector<int> comp;
  for (int k = 0; k < n; ++k)
    if (std::abs(d(k)) > tol) comp.push_back(k);

  // Pick the crossing point and window width with the largest matched mass.
  Crossing best;
  for (std::size_t j = 0; j + 1 < comp.size(); ++j) {
    if (!(d(comp[j]) > 0 && d(comp[j + 1]) < 0)) continue;
    for (int m = 1; m <= n; m *= 2) {
      Crossing c = window_at(comp, d, j, m);
      if (levels_ok(c, es.values, av, tol) && c.x.size() > best.x.size()) best = std::move(c);
    }
    if (best.x.empty()) {
      best.x = {comp[j]};
      best.y = {comp[j + 1]};
    }
  }
  if (best.x.empty()) fail(ErrorKind::Infeasible, "no crossing point between I and J");

  while (true) {
    std::vector<int> xs, ys, both;
    Matrix src(n, static_cast<Eigen::Index>(2 * best.x.size())), dst = Matrix::Zero(n, src.cols());
    Eigen::Index c = 0;
    for (int k : best.x) {
      xs.push_back(order[static_cast<std::size_t>(k)]);
      src.col(c) = es.vectors.col(k);
      dst(xs.back(), c++) = 1.0;
    }
    for (int k : best.y) {
      ys.push_back(order[static_cast<std::size_t>(k)]);
      src.col(c) = es.vectors.col(k);
      dst(ys.back(), c++) = 1.0;
    }
    both = xs;
    both.insert(both.end(), ys.begin(), ys.end());

    const averaging::Transport tr = averaging::transport_unitary(src, dst);
    const Matrix t = conjugate(tr.v, s_op.matrix());
    averaging::TwoBlockFrame frame{gather(a, xs), corner(t, xs), corner(t, ys)};
    const averaging::AveragingResult avg = averaging::averaging_unitary(frame, tol);

    PartialSolution ps;
    ps.u = tr.v;
    apply_on_slots(ps.u, both, avg.u);
    ps.p = DiagonalProjection::from_slots(n, xs);
    ps.q = tr.support;
    const Matrix t2 = conjugate(ps.u, s_op.matrix());
    ps.residual = diagonal_residual(t2, a, xs);

    const std::vector<int> rest = ps.p.complement_slots();
    bool accepted = rest.empty();
    if (!accepted) {
      const mj::MajorizationReport rr = mj::classify(
          mj::scale_from_values(gather(a, rest)), mj::spectral_scale(HermitianOperator(corner(t2, rest))), tol);
      accepted = rr.majorized();
    }
    if (accepted || best.x.size() == 1) {
      if (!accepted) fail(ErrorKind::Infeasible, "remainder lost majorization after the local step");
      return ps;
    }
    // Shrink toward the crossing point and retry.
    const std::size_t half = best.x.size() / 2;
    best.x.erase(best.x.begin(), best.x.end() - static_cast<std::ptrdiff_t>(half));
    best.y.resize(half);
  }
}

OrbitResult solve_orbit(const HermitianOperator& a_op, const HermitianOperator& s_op,
                        const SolveConfig& cfg) {
  const double tol = cfg.tol;
  const RealVector a = target_values(a_op, tol);
  const int n = a_op.n();
  if (s_op.n() != n) fail(ErrorKind::ResolutionMismatch, "A and S have different sizes");
  if (!mj::classify(mj::scale_from_values(a), mj::spectral_scale(s_op), tol).majorized())
    fail(ErrorKind::NotMajorized, "A is not majorized by S");

  OrbitResult out;
  out.u = Matrix::Identity(n, n);
  out.p = DiagonalProjection(n);
  const int budget = iteration_budget(cfg, n);

  while (true) {
    const std::vector<int> rem = out.p.complement_slots();
    if (rem.size() <= 1) break;
    const HermitianOperator tc(corner(conjugate(out.u, s_op.matrix()), rem));
    const HermitianOperator ac = HermitianOperator::diagonal(gather(a, rem));
    const auto rel = mj::classify(mj::scale_from_values(gather(a, rem)), mj::spectral_scale(tc), tol).relation;
    if (rel == mj::Relation::Equimeasurable) break;
    if (out.iterations >= budget) {
      out.converged = false;
      break;
    }
    const PartialSolution ps = local_step(ac, tc, cfg);
    apply_on_slots(out.u, rem, ps.u);
    for (int s : ps.p.slots()) out.p.insert(rem[static_cast<std::size_t>(s)]);
    ++out.iterations;
    out.tau_p_history.push_back(out.p.trace());
  }

  const std::vector<int> rem = out.p.complement_slots();
  out.w = Matrix::Identity(n, n);
  if (!rem.empty()) {
    const HermitianOperator tc(corner(conjugate(out.u, s_op.matrix()), rem));
    const SpectralDecomposition ec = spectral_decomposition(tc);
    apply_on_slots(out.w, rem, align_eigenvectors(ec.vectors, rank_slots(gather(a, rem))));
  }
  out.solution = out.w * out.u;
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  out.residual = diagonal_residual(conjugate(out.solution, s_op.matrix()), a, all);
  return out;
}

}  // namespace shorn::solver
