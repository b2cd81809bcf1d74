#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shorn/averaging.hpp"
#include "shorn/majorization.hpp"
#include "solver_detail.hpp"

namespace shorn::solver {

std::string to_string(StrictRoute r) { return r == StrictRoute::EqualGap ? "equal-gap" : "window"; }

namespace {

using namespace detail;
namespace mj = shorn::majorization;

std::vector<int> iota_slots(int first, int count) {
  std::vector<int> v(static_cast<std::size_t>(count));
  std::iota(v.begin(), v.end(), first);
  return v;
}

bool strictly_above(const RealVector& upper, const RealVector& lower, double tol) {
  const RealVector fu = mj::scale_from_values(upper).values;
  const RealVector fl = mj::scale_from_values(lower).values;
  return (fu - fl).minCoeff() > tol;
}

// Pairs `prev` (strict gap) with `next` (equimeasurable) rank by rank and
// averages each pair so that the diagonal on `prev` becomes A.
void average_halves(Matrix& u, const Matrix& s, const RealVector& a, const std::vector<int>& prev,
                    const std::vector<int>& next, double tol) {
  const Matrix t = conjugate(u, s);
  const HermitianOperator tp(corner(t, prev)), tn(corner(t, next));
  const RealVector ap = gather(a, prev), an = gather(a, next);
  if (!strictly_above(spectral_decomposition(tp).values, ap, tol))
    fail(ErrorKind::Precondition, "scale gap on the first half is not strictly positive");
  if (ap.minCoeff() < an.maxCoeff() - tol)
    fail(ErrorKind::Precondition, "sigma(A1) does not dominate sigma(A2)");
  const SpectralDecomposition en = spectral_decomposition(tn);
  if ((en.values - mj::scale_from_values(an).values).cwiseAbs().maxCoeff() > tol)
    fail(ErrorKind::Precondition, "second half is not equimeasurable to A2");

  const std::vector<int> rp = rank_slots(ap), rn = rank_slots(an);
  std::vector<int> sp, sn;
  for (int i : rp) sp.push_back(prev[static_cast<std::size_t>(i)]);
  for (int i : rn) sn.push_back(next[static_cast<std::size_t>(i)]);
  // Conjugate the k-th spectral piece of each half onto the k-th rank slot of A.
  apply_on_slots(u, prev, align_eigenvectors(spectral_decomposition(tp).vectors, rp));
  apply_on_slots(u, next, align_eigenvectors(en.vectors, rn));

  const Matrix t2 = conjugate(u, s);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    averaging::TwoBlockFrame f;
    f.a1 = RealVector::Constant(1, a(sp[i]));
    f.s1 = t2.block(sp[i], sp[i], 1, 1);
    f.s2 = t2.block(sn[i], sn[i], 1, 1);
    const averaging::AveragingResult avg = averaging::averaging_unitary(f, tol);
    const std::vector<int> pair{sp[i], sn[i]};
    apply_on_slots(u, pair, avg.u);
  }
}

Matrix block_diag(const Matrix& x, const Matrix& y) {
  Matrix m = Matrix::Zero(x.rows() + y.rows(), x.cols() + y.cols());
  m.topLeftCorner(x.rows(), x.cols()) = x;
  m.bottomRightCorner(y.rows(), y.cols()) = y;
  return m;
}

RealVector concat(const RealVector& x, const RealVector& y) {
  RealVector v(x.size() + y.size());
  v << x, y;
  return v;
}

}  // namespace

Sht2Result sht2_step(const StrictFrame& fr, double delta, const SolveConfig& cfg) {
  const int h = fr.h();
  if (h == 0 || fr.a2.size() != h || fr.s1.rows() != h || fr.s2.rows() != h)
    fail(ErrorKind::ResolutionMismatch, "both halves of the frame must have size h");
  // k+1 single-cell intervals of width eps = 1/h; need k*eps > 1 - 2*delta.
  const int k = h - 1;
  if (!(static_cast<double>(k) / h > 1.0 - 2.0 * delta))
    fail(ErrorKind::Infeasible, "interval grid with k*eps > 1 - 2*delta is not constructible at "
                                "this resolution; refine n");
  const Matrix s = block_diag(fr.s1, fr.s2);
  const RealVector a = concat(fr.a1, fr.a2);
  Sht2Result out;
  out.u = Matrix::Identity(2 * h, 2 * h);
  const std::vector<int> prev = iota_slots(0, h), next = iota_slots(h, h);
  average_halves(out.u, s, a, prev, next, cfg.tol);
  out.r1 = DiagonalProjection::from_slots(2 * h, prev);
  out.r2 = DiagonalProjection::from_slots(2 * h, next);
  out.residual = diagonal_residual(conjugate(out.u, s), a, prev);
  return out;
}

EqmResult eqm_refine(const EqmBlocks& b, const SolveConfig& cfg) {
  const int p = static_cast<int>(b.a1.size());
  const int m = static_cast<int>(b.a2.size());
  const int r = p + m;
  if (b.s1.rows() != p || b.s2.rows() != m)
    fail(ErrorKind::ResolutionMismatch, "block sizes differ between A and S");
  if (p == 0) fail(ErrorKind::Infeasible, "cascade infeasible at this resolution: tau(P) = 0");

  const Matrix s = block_diag(b.s1, b.s2);
  const RealVector a = concat(b.a1, b.a2);
  EqmResult out;
  out.u = Matrix::Identity(r, r);
  out.q = DiagonalProjection(r);
  if (2 * p >= r) {
    out.fast_path = true;
    return out;
  }
  // (k+1) tau(P) <= 1 < (k+2) tau(P)
  out.k = r / p - 1;
  const double tp = static_cast<double>(p) / r;
  out.delta = ((out.k + 2) * tp - 1.0) / (out.k * (out.k + 1));

  // Chunks of A2 by rank, each of size p.  Diagonalizing S2 onto the rank
  // slots of A2 first makes every chunk corner equimeasurable to its targets.
  const std::vector<int> tail = iota_slots(p, m);
  const std::vector<int> rn = rank_slots(b.a2);
  const SpectralDecomposition e2 = spectral_decomposition(HermitianOperator(b.s2));
  if ((e2.values - mj::scale_from_values(b.a2).values).cwiseAbs().maxCoeff() > cfg.tol)
    fail(ErrorKind::Precondition, "S2 is not equimeasurable to A2");
  apply_on_slots(out.u, tail, align_eigenvectors(e2.vectors, rn));
  std::vector<std::vector<int>> chunks(static_cast<std::size_t>(out.k));
  for (int i = 0; i < out.k; ++i)
    for (int j = 0; j < p; ++j)
      chunks[static_cast<std::size_t>(i)].push_back(tail[static_cast<std::size_t>(rn[static_cast<std::size_t>(i * p + j)])]);

  std::vector<int> prev = iota_slots(0, p);
  for (int i = 0; i < out.k; ++i) {
    const std::vector<int>& next = chunks[static_cast<std::size_t>(i)];
    average_halves(out.u, s, a, prev, next, cfg.tol);
    for (int x : prev) out.q.insert(x);
    prev = next;
  }
  out.residual = diagonal_residual(conjugate(out.u, s), a, out.q.slots());
  return out;
}

StrictStep sh1part_step(const HermitianOperator& a_op, const HermitianOperator& s_op,
                        const SolveConfig& cfg) {
  const double tol = cfg.tol;
  const RealVector a = target_values(a_op, tol);
  const int r = a_op.n();
  if (s_op.n() != r) fail(ErrorKind::ResolutionMismatch, "A and S have different sizes");

  const SpectralDecomposition es = spectral_decomposition(s_op);
  const std::vector<int> order = rank_slots(a);
  const RealVector av = gather(a, order);
  RealVector g = RealVector::Zero(r + 1);
  for (int j = 0; j < r; ++j) g(j + 1) = g(j) + (es.values(j) - av(j)) / r;

  if (std::abs(g(r)) > tol) fail(ErrorKind::NotMajorized, "traces of A and S differ");
  double interior = std::numeric_limits<double>::infinity();
  for (int j = 1; j < r; ++j) interior = std::min(interior, g(j));
  if (r < 2 || !(interior > cfg.strictness_margin))
    fail(ErrorKind::Precondition, "strictness margin below threshold");
  const int lo = r / 8;
  const int hi = (7 * r + 7) / 8;
  if (lo < 1 || hi > r - 1 || lo >= hi)
    fail(ErrorKind::Infeasible, "grid too coarse to place a < 1/8 < 7/8 < b; refine n");

  double alpha = std::numeric_limits<double>::infinity();
  for (int j = lo; j <= hi; ++j) alpha = std::min(alpha, g(j));
  const double level = alpha / 2;

  StrictStep out;
  out.u = align_eigenvectors(es.vectors, order);
  out.p = DiagonalProjection(r);

  // Cut points with equal gap and a strictly larger gap in between.
  int ba = -1, bb = -1;
  double bscore = std::numeric_limits<double>::infinity();
  for (int ca = 1; ca <= lo; ++ca)
    for (int cb = hi; cb <= r - 1; ++cb) {
      if (std::abs(g(ca) - g(cb)) > tol) continue;
      const double top = std::max(g(ca), g(cb));
      bool inside = true;
      for (int j = ca + 1; j < cb && inside; ++j) inside = g(j) > top + tol;
      if (!inside) continue;
      const double score = std::abs(g(ca) - level) - 1e-3 * tol * (cb - ca);
      if (score < bscore) {
        bscore = score;
        ba = ca;
        bb = cb;
      }
    }

  if (ba >= 0) {
    out.route = StrictRoute::EqualGap;
    out.cut_a = ba;
    out.cut_b = bb;
    const std::vector<int> mid(order.begin() + ba, order.begin() + bb);
    const HermitianOperator tm(corner(conjugate(out.u, s_op.matrix()), mid));
    const OrbitResult orb = solve_orbit(HermitianOperator::diagonal(gather(a, mid)), tm, cfg);
    if (!orb.converged) fail(ErrorKind::IterationLimit, "middle block did not converge");
    apply_on_slots(out.u, mid, orb.solution);
    for (int x : mid) out.p.insert(x);
  } else {
    out.route = StrictRoute::Window;
    int wa = 1, wb = r - 1;
    for (int j = lo; j >= 1; --j)
      if (g(j) <= level) {
        wa = j;
        break;
      }
    for (int j = hi; j <= r - 1; ++j)
      if (g(j) <= level) {
        wb = j;
        break;
      }
    out.cut_a = wa;
    out.cut_b = wb;
    std::vector<bool> in_window(static_cast<std::size_t>(r), false);
    for (int k = wa; k < wb; ++k) in_window[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;

    RealVector t = conjugate(out.u, s_op.matrix()).diagonal().real();
    const int target = (r + 1) / 2;
    while (out.p.rank() < target) {
      std::vector<int> rem = out.p.complement_slots();
      std::stable_sort(rem.begin(), rem.end(), [&](int i, int j) { return a(i) > a(j); });
      // Keep the remainder corner matched rank by rank with A.
      const std::vector<int> tr = rank_slots(gather(t, rem));
      bool sorted = true;
      for (std::size_t i = 0; i < tr.size(); ++i) sorted = sorted && tr[i] == static_cast<int>(i);
      if (!sorted) {
        Matrix perm = Matrix::Zero(static_cast<Eigen::Index>(rem.size()), static_cast<Eigen::Index>(rem.size()));
        RealVector nt = t;
        for (std::size_t i = 0; i < rem.size(); ++i) {
          perm(static_cast<Eigen::Index>(i), tr[i]) = 1.0;
          nt(rem[i]) = t(rem[static_cast<std::size_t>(tr[i])]);
        }
        apply_on_slots(out.u, rem, perm);
        t = nt;
      }
      const auto d = [&](std::size_t i) { return t(rem[i]) - a(rem[i]); };
      const auto win = [&](std::size_t i) { return in_window[static_cast<std::size_t>(rem[i])]; };

      int pick_eq = -1;
      for (std::size_t i = 0; i < rem.size(); ++i)
        if (std::abs(d(i)) <= tol && (pick_eq < 0 || (win(i) && !win(static_cast<std::size_t>(pick_eq)))))
          pick_eq = static_cast<int>(i);
      if (pick_eq >= 0) {
        out.p.insert(rem[static_cast<std::size_t>(pick_eq)]);
        continue;
      }
      int pick = -1;
      for (std::size_t i = 0; i + 1 < rem.size(); ++i) {
        if (!(d(i) > tol && d(i + 1) < -tol)) continue;
        const bool w = win(i) && win(i + 1);
        if (pick < 0 || (w && !(win(static_cast<std::size_t>(pick)) && win(static_cast<std::size_t>(pick) + 1))))
          pick = static_cast<int>(i);
      }
      if (pick < 0) fail(ErrorKind::Infeasible, "no crossing pair left in a strictly majorized corner");
      const int sp = rem[static_cast<std::size_t>(pick)], sn = rem[static_cast<std::size_t>(pick) + 1];
      averaging::TwoBlockFrame f;
      f.a1 = RealVector::Constant(1, a(sp));
      f.s1 = Matrix::Constant(1, 1, t(sp));
      f.s2 = Matrix::Constant(1, 1, t(sn));
      const averaging::AveragingResult avg = averaging::averaging_unitary(f, tol);
      const std::vector<int> pair{sp, sn};
      apply_on_slots(out.u, pair, avg.u);
      t(sp) = a(sp);
      t(sn) = avg.y(0, 0).real();
      out.p.insert(sp);
    }
  }

  const Matrix t2 = conjugate(out.u, s_op.matrix());
  out.residual = diagonal_residual(t2, a, out.p.slots());
  const std::vector<int> rest = out.p.complement_slots();
  if (rest.size() >= 2) {
    const auto rel = mj::classify(mj::scale_from_values(gather(a, rest)),
                                  mj::spectral_scale(HermitianOperator(corner(t2, rest))), tol)
                         .relation;
    out.remainder_strict = rel == mj::Relation::Strict;
  }
  return out;
}

}  // namespace shorn::solver
