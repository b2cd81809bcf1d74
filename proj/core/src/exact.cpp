#include <algorithm>
#include <cmath>
#include <numeric>

#include "shorn/majorization.hpp"
#include "solver_detail.hpp"

namespace shorn::solver {

namespace {

using namespace detail;
namespace mj = shorn::majorization;

// Splits complement ranks into strict intervals at zeros of F_S - F_A.
std::vector<std::vector<int>> strict_intervals(const std::vector<int>& comp, const RealVector& d,
                                               int n, double tol) {
  std::vector<std::vector<int>> parts;
  std::vector<int> cur;
  double g = 0.0;
  for (std::size_t i = 0; i < comp.size(); ++i) {
    cur.push_back(comp[i]);
    g += d(comp[i]) / n;
    if (std::abs(g) <= tol / n || i + 1 == comp.size()) {
      parts.push_back(cur);
      cur.clear();
    }
  }
  // Pieces shorter than 2/n are merged into a neighbour.
  std::vector<std::vector<int>> merged;
  for (auto& p : parts) {
    if (p.size() < 2 && !merged.empty())
      merged.back().insert(merged.back().end(), p.begin(), p.end());
    else
      merged.push_back(std::move(p));
  }
  if (merged.size() > 1 && merged.front().size() < 2) {
    merged[1].insert(merged[1].begin(), merged[0].begin(), merged[0].end());
    merged.erase(merged.begin());
  }
  return merged;
}

}  // namespace

ExactResult solve_exact(const HermitianOperator& a_op, const HermitianOperator& s_op,
                        const SolveConfig& cfg) {
  const double tol = cfg.tol;
  const RealVector a = target_values(a_op, tol);
  const int n = a_op.n();
  if (s_op.n() != n) fail(ErrorKind::ResolutionMismatch, "A and S have different sizes");

  const SpectralDecomposition es = spectral_decomposition(s_op);
  const std::vector<int> order = rank_slots(a);
  const RealVector av = gather(a, order);
  if (!mj::classify(mj::scale_from_values(av), mj::SpectralScale{es.values}, tol).majorized())
    fail(ErrorKind::NotMajorized, "A is not majorized by S");

  ExactResult out;
  out.u = align_eigenvectors(es.vectors, order);
  const Matrix& s = s_op.matrix();
  const RealVector d = es.values - av;
  int solved = 0;

  std::vector<int> eq_slots, comp;
  for (int k = 0; k < n; ++k) {
    if (std::abs(d(k)) <= tol)
      eq_slots.push_back(order[static_cast<std::size_t>(k)]);
    else
      comp.push_back(k);
  }
  out.equal_slots = static_cast<int>(eq_slots.size());
  if (!eq_slots.empty()) {
    const HermitianOperator te(corner(conjugate(out.u, s), eq_slots));
    const OrbitResult orb = solve_orbit(HermitianOperator::diagonal(gather(a, eq_slots)), te, cfg);
    apply_on_slots(out.u, eq_slots, orb.solution);
    solved += out.equal_slots;
    out.tau_p_history.push_back(static_cast<double>(solved) / n);
  }

  const int budget = iteration_budget(cfg, n) +
                     static_cast<int>(std::ceil(std::log2(std::max(2, n))));
  int steps = 0;
  for (const std::vector<int>& ranks : strict_intervals(comp, d, n, tol)) {
    ++out.strict_blocks;
    std::vector<int> rem;
    for (int k : ranks) rem.push_back(order[static_cast<std::size_t>(k)]);
    std::vector<double> hist{static_cast<double>(rem.size()) / n};
    while (!rem.empty()) {
      if (rem.size() == 1) {
        // The trace forces the last diagonal entry.
        ++solved;
        rem.clear();
        hist.push_back(0.0);
        out.tau_p_history.push_back(static_cast<double>(solved) / n);
        break;
      }
      if (++steps > budget) fail(ErrorKind::IterationLimit, "strict loop exceeded its iteration budget");
      const HermitianOperator tc(corner(conjugate(out.u, s), rem));
      const HermitianOperator ac = HermitianOperator::diagonal(gather(a, rem));
      bool finished = false;
      try {
        const StrictStep st = sh1part_step(ac, tc, cfg);
        if (!st.remainder_strict) throw Error(ErrorKind::Precondition, "remainder lost strictness");
        apply_on_slots(out.u, rem, st.u);
        std::vector<int> next;
        for (std::size_t i = 0; i < rem.size(); ++i)
          if (!st.p.contains(static_cast<int>(i))) next.push_back(rem[i]);
        solved += static_cast<int>(rem.size() - next.size());
        rem = std::move(next);
        (st.route == StrictRoute::EqualGap ? out.equal_gap_steps : out.window_steps)++;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Precondition && e.kind() != ErrorKind::Infeasible) throw;
        finished = true;
      }
      if (finished) {
        // Below the grid floor of the strict step: close the corner in orbit mode.
        const OrbitResult orb = solve_orbit(ac, tc, cfg);
        if (!orb.converged) fail(ErrorKind::IterationLimit, "orbit finish did not converge");
        apply_on_slots(out.u, rem, orb.solution);
        out.iterations += orb.iterations;
        ++out.orbit_finishes;
        solved += static_cast<int>(rem.size());
        rem.clear();
      }
      ++out.iterations;
      hist.push_back(static_cast<double>(rem.size()) / n);
      out.tau_p_history.push_back(static_cast<double>(solved) / n);
    }
    out.tail_history.push_back(std::move(hist));
  }

  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  out.residual = diagonal_residual(conjugate(out.u, s), a, all);
  return out;
}

CarpenterResult carpenter(std::span<const double> d, const SolveConfig& cfg) {
  const int n = static_cast<int>(d.size());
  if (n == 0) fail(ErrorKind::InvalidInput, "empty diagonal");
  double sum = 0.0;
  for (double x : d) {
    if (!std::isfinite(x) || x < -cfg.tol || x > 1 + cfg.tol)
      fail(ErrorKind::InvalidInput, "diagonal entries must lie in [0,1]");
    sum += x;
  }
  const double k = std::round(sum);
  if (std::abs(sum - k) > cfg.tol * n)
    fail(ErrorKind::InvalidInput, "sum of the diagonal is not an integer");
  CarpenterResult out;
  out.rank = static_cast<int>(k);
  RealVector sv = RealVector::Zero(n);
  sv.head(out.rank).setOnes();
  const HermitianOperator s = HermitianOperator::diagonal(sv);
  RealVector dv(n);
  for (int i = 0; i < n; ++i) dv(i) = std::clamp(d[static_cast<std::size_t>(i)], 0.0, 1.0);
  const ExactResult ex = solve_exact(HermitianOperator::diagonal(dv), s, cfg);
  out.u = ex.u;
  out.projection = conjugate(ex.u, s.matrix());
  out.residual = ex.residual;
  out.idempotence = max_abs(out.projection * out.projection - out.projection);
  return out;
}

}  // namespace shorn::solver
