#include "shorn/choquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "shorn/majorization.hpp"
#include "solver_detail.hpp"

namespace shorn::choquet {

double AtomicMeasure::mass() const {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.mass;
  return m;
}

double AtomicMeasure::first_moment() const {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.value * a.mass;
  return m;
}

AtomicMeasure spectral_measure(const HermitianOperator& s) {
  const RealVector v = spectral_decomposition(s).values;
  AtomicMeasure mu;
  for (Eigen::Index i = 0; i < v.size(); ++i) mu.atoms.push_back({v(i), 1.0 / static_cast<double>(v.size())});
  return mu;
}

namespace {

// Atoms sorted by value, largest first, as parallel arrays.
struct Quantile {
  std::vector<int> index;  // position in the original measure
  std::vector<double> value;
  std::vector<double> mass;

  explicit Quantile(const AtomicMeasure& mu) {
    index.resize(mu.atoms.size());
    std::iota(index.begin(), index.end(), 0);
    std::stable_sort(index.begin(), index.end(), [&](int i, int j) {
      return mu.atoms[static_cast<std::size_t>(i)].value > mu.atoms[static_cast<std::size_t>(j)].value;
    });
    for (int i : index) {
      value.push_back(mu.atoms[static_cast<std::size_t>(i)].value);
      mass.push_back(mu.atoms[static_cast<std::size_t>(i)].mass);
    }
  }

  double total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

  // Integral of the quantile function over [0, x].
  double integral(double x) const {
    double acc = 0.0, c = 0.0;
    for (std::size_t i = 0; i < mass.size() && c < x; ++i) {
      acc += value[i] * std::clamp(x - c, 0.0, mass[i]);
      c += mass[i];
    }
    return acc;
  }

  // Mass of each atom inside the quantile window [t, t + m].
  std::vector<double> window(double t, double m) const {
    std::vector<double> w(mass.size(), 0.0);
    double c = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      const double lo = std::max(t, c), hi = std::min(t + m, c + mass[i]);
      if (hi > lo) w[i] = std::min(mass[i], hi - lo);
      c += mass[i];
    }
    return w;
  }
};

double scale_of(const AtomicMeasure& mu) {
  double s = 1.0;
  for (const Atom& a : mu.atoms) s = std::max(s, std::abs(a.value));
  return s;
}

void validate(const AtomicMeasure& mu) {
  if (mu.atoms.empty()) fail(ErrorKind::InvalidInput, "measure has no atoms");
  for (const Atom& a : mu.atoms)
    if (!std::isfinite(a.value) || !std::isfinite(a.mass) || a.mass < 0)
      fail(ErrorKind::InvalidInput, "atoms need finite values and non-negative masses");
}

// Start of the highest window of mass m whose mean is `mean`.
double find_window(const Quantile& q, double m, double mean, double tol) {
  const double total = q.total();
  const double last = std::max(0.0, total - m);
  const auto w = [&](double t) { return (q.integral(t + m) - q.integral(t)) / m; };
  if (w(0.0) <= mean) return 0.0;
  if (w(last) > mean + tol) fail(ErrorKind::Infeasible, "no window of the remaining mass has the target mean");

  std::vector<double> br{0.0, last};
  double c = 0.0;
  for (double x : q.mass) {
    c += x;
    for (double b : {c, c - m})
      if (b > 0 && b < last) br.push_back(b);
  }
  std::sort(br.begin(), br.end());
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double w0 = w(br[i]), w1 = w(br[i + 1]);
    if (w1 > mean) continue;
    if (w0 - w1 <= 0) return br[i];
    return br[i] + (w0 - mean) / (w0 - w1) * (br[i + 1] - br[i]);
  }
  return last;
}

void repair(Eigen::MatrixXd& parts, const AtomicMeasure& mu, std::span<const TargetPart> targets, double tol) {
  const Eigen::Index k = parts.rows(), na = parts.cols();
  for (int sweep = 0; sweep < 64; ++sweep) {
    bool clean = true;
    for (Eigen::Index j = 0; j < k; ++j) {
      double moment = 0.0;
      for (Eigen::Index i = 0; i < na; ++i) moment += parts(j, i) * mu.atoms[static_cast<std::size_t>(i)].value;
      double need = targets[static_cast<std::size_t>(j)].mass * targets[static_cast<std::size_t>(j)].mean - moment;
      if (std::abs(need) <= tol * targets[static_cast<std::size_t>(j)].mass) continue;
      clean = false;
      // Move mass of part j from atom v to atom u and back for partner l.
      for (Eigen::Index l = 0; l < k && std::abs(need) > 0; ++l) {
        if (l == j) continue;
        for (Eigen::Index u = 0; u < na && std::abs(need) > 0; ++u)
          for (Eigen::Index v = 0; v < na && std::abs(need) > 0; ++v) {
            const double gain = mu.atoms[static_cast<std::size_t>(u)].value - mu.atoms[static_cast<std::size_t>(v)].value;
            if (gain * need <= 0) continue;
            const double avail = std::min(parts(j, v), parts(l, u));
            const double delta = std::min(avail, need / gain);
            if (delta <= 0) continue;
            parts(j, v) -= delta;
            parts(j, u) += delta;
            parts(l, u) -= delta;
            parts(l, v) += delta;
            need -= delta * gain;
          }
      }
    }
    if (clean) return;
  }
}

}  // namespace

bool measure_majorized(const AtomicMeasure& lower, const AtomicMeasure& upper, double tol) {
  validate(lower);
  validate(upper);
  const Quantile ql(lower), qu(upper);
  const double sc = std::max(scale_of(lower), scale_of(upper));
  if (std::abs(ql.total() - qu.total()) > tol) return false;
  if (std::abs(lower.first_moment() - upper.first_moment()) > tol * sc) return false;
  std::vector<double> pts;
  double c = 0.0;
  for (double m : ql.mass) pts.push_back(c += m);
  c = 0.0;
  for (double m : qu.mass) pts.push_back(c += m);
  for (double x : pts)
    if (ql.integral(x) > qu.integral(x) + tol * sc) return false;
  return true;
}

Eigen::MatrixXd split_masses(const AtomicMeasure& mu, std::span<const TargetPart> targets, double tol) {
  validate(mu);
  if (targets.empty()) fail(ErrorKind::InvalidInput, "no target parts");
  const double sc = scale_of(mu);
  double tm = 0.0, tf = 0.0;
  for (const TargetPart& t : targets) {
    if (!(t.mass > 0) || !std::isfinite(t.mean)) fail(ErrorKind::InvalidInput, "target parts need positive mass");
    tm += t.mass;
    tf += t.mass * t.mean;
  }
  if (std::abs(tm - mu.mass()) > tol) fail(ErrorKind::InvalidInput, "target masses do not add up to the mass of mu");
  if (std::abs(tf - mu.first_moment()) > tol * sc)
    fail(ErrorKind::NotMajorized, "target first moment differs from that of mu");

  std::vector<std::size_t> ord(targets.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](std::size_t i, std::size_t j) { return targets[i].mean > targets[j].mean; });

  // Partial sums of the target step function against the quantile integral.
  Quantile q(mu);
  {
    double x = 0.0, f = 0.0;
    for (std::size_t r = 0; r < ord.size(); ++r) {
      x += targets[ord[r]].mass;
      f += targets[ord[r]].mass * targets[ord[r]].mean;
      if (f > q.integral(x) + tol * sc)
        fail(ErrorKind::NotMajorized, "target partial sum " + std::to_string(r + 1) + " exceeds that of mu");
    }
  }

  Eigen::MatrixXd parts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(targets.size()),
                                                static_cast<Eigen::Index>(mu.atoms.size()));
  for (std::size_t r = 0; r < ord.size(); ++r) {
    const TargetPart& t = targets[ord[r]];
    std::vector<double> take;
    if (r + 1 == ord.size()) {
      take = q.mass;
    } else {
      const double m = std::min(t.mass, q.total());
      take = q.window(find_window(q, m, t.mean, tol), m);
    }
    for (std::size_t i = 0; i < take.size(); ++i) {
      parts(static_cast<Eigen::Index>(ord[r]), q.index[i]) += take[i];
      q.mass[i] = std::max(0.0, q.mass[i] - take[i]);
    }
  }

  // Post-verification: masses and means of every part.
  bool ok = true;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    double m = parts.row(jj).sum(), f = 0.0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) f += parts(jj, static_cast<Eigen::Index>(i)) * mu.atoms[i].value;
    ok = ok && std::abs(m - targets[j].mass) <= tol && std::abs(f - m * targets[j].mean) <= tol * sc * m;
  }
  if (!ok) {
    repair(parts, mu, targets, tol);
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      double f = 0.0;
      for (std::size_t i = 0; i < mu.atoms.size(); ++i) f += parts(jj, static_cast<Eigen::Index>(i)) * mu.atoms[i].value;
      if (std::abs(f - targets[j].mass * targets[j].mean) > tol * sc * targets[j].mass)
        fail(ErrorKind::Infeasible, "split could not be repaired to the target means");
    }
  }
  return parts;
}

std::vector<AtomicMeasure> measure_split(const AtomicMeasure& mu, std::span<const TargetPart> targets, double tol) {
  const Eigen::MatrixXd parts = split_masses(mu, targets, tol);
  std::vector<AtomicMeasure> out(targets.size());
  for (Eigen::Index j = 0; j < parts.rows(); ++j)
    for (Eigen::Index i = 0; i < parts.cols(); ++i)
      if (parts(j, i) > 0) out[static_cast<std::size_t>(j)].atoms.push_back({mu.atoms[static_cast<std::size_t>(i)].value, parts(j, i)});
  return out;
}

FiniteSpectrumResult finite_spectrum_solve(const HermitianOperator& a_op, const HermitianOperator& s_op,
                                           const solver::SolveConfig& cfg, int refine_cap) {
  const double tol = cfg.tol;
  const RealVector a = solver::detail::target_values(a_op, tol);
  const int n = a_op.n();
  if (s_op.n() != n) fail(ErrorKind::ResolutionMismatch, "A and S have different sizes");
  if (refine_cap < 1) fail(ErrorKind::InvalidInput, "refinement cap must be positive");

  // Levels of A, largest first.
  const std::vector<int> order = solver::detail::rank_slots(a);
  std::vector<std::vector<int>> levels;
  std::vector<double> level_value;
  for (int s : order) {
    if (levels.empty() || std::abs(a(s) - level_value.back()) > tol) {
      levels.emplace_back();
      level_value.push_back(a(s));
    }
    levels.back().push_back(s);
  }

  const SpectralDecomposition es = spectral_decomposition(s_op);
  AtomicMeasure mu;
  for (int i = 0; i < n; ++i) mu.atoms.push_back({es.values(i), 1.0 / n});
  std::vector<TargetPart> targets;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    double m = 0.0;
    for (int s : levels[j]) m += a(s);
    targets.push_back({static_cast<double>(levels[j].size()) / n, m / static_cast<double>(levels[j].size())});
  }
  const Eigen::MatrixXd parts = split_masses(mu, targets, tol);

  // Smallest m making every split mass a multiple of 1/(n m).
  int m = 0;
  for (int c = 1; c <= refine_cap && m == 0; ++c) {
    const Eigen::MatrixXd cnt = parts * static_cast<double>(n) * c;
    if ((cnt - cnt.array().round().matrix()).cwiseAbs().maxCoeff() <= 1e-7) m = c;
  }
  if (m == 0)
    fail(ErrorKind::Infeasible, "split needs a refinement factor above the cap of " + std::to_string(refine_cap));
  const Eigen::MatrixXi counts = (parts * static_cast<double>(n) * m).array().round().cast<int>().matrix();

  FiniteSpectrumResult out;
  out.refinement = m;
  out.levels = static_cast<int>(levels.size());
  out.parts = measure_split(mu, targets, tol);
  const int big = n * m;
  out.target.resize(big);
  out.source = Matrix::Zero(big, big);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) {
      out.target(r * m + c) = a(r);
      for (int q = 0; q < n; ++q) out.source(r * m + c, q * m + c) = s_op.matrix()(r, q);
    }

  // Eigenvector copies v_i (x) e_c handed to each level.
  const auto refined = [&](int i, int c) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(big);
    for (int r = 0; r < n; ++r) v(r * m + c) = es.vectors(r, i);
    return v;
  };
  Matrix v = Matrix::Zero(big, big);
  std::vector<std::vector<int>> block_slots(levels.size());
  std::vector<int> next_copy(static_cast<std::size_t>(n), 0);
  for (std::size_t j = 0; j < levels.size(); ++j) {
    std::vector<int>& slots = block_slots[j];
    for (int s : levels[j])
      for (int c = 0; c < m; ++c) slots.push_back(s * m + c);
    std::sort(slots.begin(), slots.end());
    std::vector<std::pair<int, int>> copies;  // (atom, copy)
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < counts(static_cast<Eigen::Index>(j), i); ++t) copies.emplace_back(i, next_copy[static_cast<std::size_t>(i)]++);
    if (copies.size() != slots.size()) fail(ErrorKind::Infeasible, "split counts do not match the level size");
    // Keep an eigenvector on its own slot when that slot belongs to the level.
    std::vector<bool> taken(slots.size(), false), placed(copies.size(), false);
    for (std::size_t q = 0; q < copies.size(); ++q) {
      const Eigen::VectorXcd x = refined(copies[q].first, copies[q].second);
      Eigen::Index home = 0;
      x.cwiseAbs().maxCoeff(&home);
      const auto it = std::lower_bound(slots.begin(), slots.end(), static_cast<int>(home));
      if (it != slots.end() && *it == home && !taken[static_cast<std::size_t>(it - slots.begin())]) {
        taken[static_cast<std::size_t>(it - slots.begin())] = true;
        placed[q] = true;
        v.row(home) = x.adjoint();
      }
    }
    std::size_t free_slot = 0;
    for (std::size_t q = 0; q < copies.size(); ++q) {
      if (placed[q]) continue;
      while (taken[free_slot]) ++free_slot;
      taken[free_slot] = true;
      v.row(slots[free_slot]) = refined(copies[q].first, copies[q].second).adjoint();
    }
  }

  out.u = v;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const std::vector<int>& slots = block_slots[j];
    const HermitianOperator tc(corner(conjugate(out.u, out.source), slots));
    const RealVector ac = solver::detail::gather(out.target, slots);
    const auto rel = majorization::classify(majorization::scale_from_values(ac), majorization::spectral_scale(tc), tol).relation;
    if (rel == majorization::Relation::Equimeasurable && tc.is_diagonal(tol)) continue;
    const solver::ExactResult ex = solver::solve_exact(HermitianOperator::diagonal(ac), tc, cfg);
    apply_on_slots(out.u, slots, ex.u);
  }
  std::vector<int> all(static_cast<std::size_t>(big));
  std::iota(all.begin(), all.end(), 0);
  out.residual = solver::detail::diagonal_residual(conjugate(out.u, out.source), out.target, all);
  return out;
}

}  // namespace shorn::choquet
