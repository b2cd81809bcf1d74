#include "shorn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "shorn/majorization.hpp"

namespace shorn::oracle {

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
int Rng::index(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

double Rng::normal() {
  double u = uniform();
  while (u <= 0.0) u = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * uniform());
}

void t_transform(RealVector& d, int i, int j, double blend) {
  if (i == j || blend < 0 || blend > 1) fail(ErrorKind::InvalidInput, "bad T-transform");
  const double x = d(i), y = d(j);
  d(i) = blend * x + (1 - blend) * y;
  d(j) = (1 - blend) * x + blend * y;
}

InstanceSpec generate_instance(int n, std::uint64_t seed, int transforms) {
  if (n <= 0) fail(ErrorKind::InvalidInput, "n must be positive");
  Rng rng(seed);
  InstanceSpec spec;
  spec.n = n;
  spec.seed = seed;
  spec.transforms = transforms < 0 ? 2 * n : transforms;
  spec.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) spec.eigenvalues(i) = rng.uniform(0.5, 10.0);
  std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end(), std::greater<>());
  spec.target_diagonal = spec.eigenvalues;
  for (int i = n - 1; i > 0; --i) std::swap(spec.target_diagonal(i), spec.target_diagonal(rng.index(i + 1)));
  if (n >= 2)
    for (int k = 0; k < spec.transforms; ++k) {
      const int i = rng.index(n);
      int j = rng.index(n - 1);
      if (j >= i) ++j;
      t_transform(spec.target_diagonal, i, j, rng.uniform());
    }
  return spec;
}

Matrix random_unitary(int n, Rng& rng, bool real) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = real ? Complex(rng.normal(), 0.0) : Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex z = r(j, j);
    if (std::abs(z) > 0) q.col(j) *= z / std::abs(z);
  }
  return q;
}

HermitianOperator random_psd(int n, Rng& rng, bool real) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = real ? Complex(rng.normal(), 0.0) : Complex(rng.normal(), rng.normal());
  return HermitianOperator(Matrix(g * g.adjoint() / static_cast<double>(n)));
}

HermitianOperator rotated(const RealVector& spectrum, Rng& rng, bool real) {
  const Matrix w = random_unitary(static_cast<int>(spectrum.size()), rng, real);
  return HermitianOperator(Matrix(w * spectrum.cast<Complex>().asDiagonal() * w.adjoint()));
}

bool classically_majorized(const RealVector& lambda, const RealVector& d, double tol) {
  if (lambda.size() != d.size()) return false;
  std::vector<double> l(lambda.begin(), lambda.end()), x(d.begin(), d.end());
  std::sort(l.begin(), l.end(), std::greater<>());
  std::sort(x.begin(), x.end(), std::greater<>());
  double sl = 0.0, sx = 0.0;
  const double n = static_cast<double>(l.size());
  for (std::size_t k = 0; k < l.size(); ++k) {
    sl += l[k];
    sx += x[k];
    if (sx > sl + tol * n) return false;
  }
  return std::abs(sl - sx) <= tol * n;
}

Eigen::MatrixXd classical_construct(const RealVector& lambda, const RealVector& d, double tol) {
  const int n = static_cast<int>(lambda.size());
  if (n == 0 || d.size() != n) fail(ErrorKind::InvalidInput, "spectrum and diagonal must have the same positive length");
  if (!classically_majorized(lambda, d, tol)) fail(ErrorKind::NotMajorized, "diagonal is not majorized by the spectrum");

  RealVector lam = lambda;
  std::sort(lam.begin(), lam.end(), std::greater<>());
  Eigen::MatrixXd m = lam.asDiagonal();

  std::vector<int> want(static_cast<std::size_t>(n));  // target indices, largest first
  std::iota(want.begin(), want.end(), 0);
  std::stable_sort(want.begin(), want.end(), [&](int i, int j) { return d(i) > d(j); });

  std::vector<int> active(static_cast<std::size_t>(n));
  std::iota(active.begin(), active.end(), 0);
  std::vector<int> owner(static_cast<std::size_t>(n), -1);  // slot -> target index

  for (int step = 0; step + 1 < n; ++step) {
    const double target = d(want[static_cast<std::size_t>(step)]);
    std::stable_sort(active.begin(), active.end(), [&](int i, int j) { return m(i, i) > m(j, j); });
    std::size_t j = 0;
    while (j + 1 < active.size() && m(active[j + 1], active[j + 1]) >= target) ++j;
    int done = active[j];
    if (j + 1 < active.size()) {
      const int p = active[j], q = active[j + 1];
      const double hi = m(p, p), lo = m(q, q);
      const double c2 = hi - lo > tol ? std::clamp((target - lo) / (hi - lo), 0.0, 1.0) : 1.0;
      const double c = std::sqrt(c2), s = std::sqrt(1.0 - c2);
      // Rotation in the (p, q) plane; the active block is diagonal.
      const Eigen::VectorXd rp = m.row(p), rq = m.row(q);
      m.row(p) = c * rp + s * rq;
      m.row(q) = -s * rp + c * rq;
      const Eigen::VectorXd cp = m.col(p), cq = m.col(q);
      m.col(p) = c * cp + s * cq;
      m.col(q) = -s * cp + c * cq;
      done = p;
    }
    owner[static_cast<std::size_t>(done)] = want[static_cast<std::size_t>(step)];
    active.erase(std::find(active.begin(), active.end(), done));
  }
  owner[static_cast<std::size_t>(active.front())] = want[static_cast<std::size_t>(n - 1)];

  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) out(owner[static_cast<std::size_t>(i)], owner[static_cast<std::size_t>(k)]) = m(i, k);
  return out;
}

bool PartialSolutionReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

const InvariantCheck& PartialSolutionReport::at(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  fail(ErrorKind::InvalidInput, "no invariant named " + name);
}

PartialSolutionReport check_partial_solution(const HermitianOperator& a, const HermitianOperator& s,
                                             const solver::PartialSolution& ps, double tol) {
  const int n = a.n();
  if (s.n() != n || ps.u.rows() != n || ps.q.rows() != n || ps.p.n() != n)
    fail(ErrorKind::ResolutionMismatch, "partial solution does not match the operands");
  PartialSolutionReport rep;
  const auto add = [&](std::string name, double measured, double bound) {
    rep.checks.push_back({std::move(name), measured <= bound, measured, bound});
  };
  const Matrix id = Matrix::Identity(n, n);
  add("unitarity", unitarity_defect(ps.u), tol);

  const Matrix t = ps.u * s.matrix() * ps.u.adjoint();
  const std::vector<int> in = ps.p.slots(), out = ps.p.complement_slots();
  double diag = 0.0;
  for (int i : in) diag = std::max(diag, std::abs(t(i, i) - a.matrix()(i, i)));
  add("diagonal", diag, tol);

  double maj = 0.0;
  if (!out.empty()) {
    RealVector ar(static_cast<Eigen::Index>(out.size()));
    Matrix tc(ar.size(), ar.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      ar(static_cast<Eigen::Index>(i)) = a.matrix()(out[i], out[i]).real();
      for (std::size_t k = 0; k < out.size(); ++k) tc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = t(out[i], out[k]);
    }
    const auto r = majorization::classify(majorization::scale_from_values(ar),
                                          majorization::spectral_scale(HermitianOperator(tc, 1e-8)), tol);
    maj = r.majorized() ? 0.0 : std::max(-r.slack, std::abs(r.trace_gap));
  }
  add("remainder-majorized", maj, tol);

  const double tq = ps.q.trace().real() / n;
  add("trace-bound", tq - (4.0 * ps.p.trace() + 1.0 / n), tol);
  add("locality", max_abs((id - ps.q) * (ps.u - id)), tol);
  add("p-below-q", max_abs(ps.q * ps.p.matrix() - ps.p.matrix()), tol);
  add("q-projection", max_abs(ps.q * ps.q - ps.q) + max_abs(ps.q - ps.q.adjoint()), tol);
  return rep;
}

}  // namespace shorn::oracle
