#include "shorn/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace shorn::majorization {

double SpectralScale::at(double t) const {
  if (t < 0 || t >= 1) fail(ErrorKind::InvalidInput, "scale is defined on [0,1)");
  const int k = std::min(n() - 1, static_cast<int>(std::floor(t * n())));
  return values(k);
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Exact: return "exact";
    case Relation::Strict: return "strict";
    case Relation::Weak: return "weak";
    case Relation::None: return "none";
    case Relation::Equimeasurable: return "equimeasurable";
  }
  return "none";
}

Relation relation_from_string(const std::string& s) {
  if (s == "exact") return Relation::Exact;
  if (s == "strict") return Relation::Strict;
  if (s == "weak") return Relation::Weak;
  if (s == "none") return Relation::None;
  if (s == "equimeasurable") return Relation::Equimeasurable;
  fail(ErrorKind::InvalidInput, "unknown relation '" + s + "'");
}

SpectralScale spectral_scale(const HermitianOperator& a) {
  return SpectralScale{spectral_decomposition(a).values};
}

SpectralScale scale_from_values(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end(), std::greater<>());
  SpectralScale f;
  f.values = Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
  return f;
}

SpectralScale scale_from_values(const RealVector& values) {
  return scale_from_values(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

KyFanCurve ky_fan(const SpectralScale& f) {
  const int n = f.n();
  KyFanCurve c;
  c.samples = RealVector::Zero(n + 1);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    acc += f.values(k);
    c.samples(k + 1) = acc / n;
  }
  return c;
}

namespace {

void require_positive(const SpectralScale& f, const char* which) {
  if (f.n() == 0) fail(ErrorKind::InvalidInput, "empty spectral scale");
  const double floor = -kEigTol * std::max(1.0, std::abs(f.values(0)));
  if (f.values(f.n() - 1) < floor)
    fail(ErrorKind::InvalidInput, std::string(which) + " has negative spectrum beyond tolerance");
}

}  // namespace

MajorizationReport classify(const SpectralScale& fa, const SpectralScale& fs, double tol) {
  if (fa.n() != fs.n()) fail(ErrorKind::ResolutionMismatch, "scales live on different grids");
  require_positive(fa, "A");
  require_positive(fs, "S");
  const int n = fa.n();
  MajorizationReport r;
  r.gap = ky_fan(fs).samples - ky_fan(fa).samples;
  r.slack = r.gap.minCoeff();
  r.trace_gap = r.gap(n);

  if ((fa.values - fs.values).cwiseAbs().maxCoeff() <= tol) {
    r.relation = Relation::Equimeasurable;
    return r;
  }
  const bool dominated = r.slack >= -tol;
  if (!dominated) {
    r.relation = Relation::None;
  } else if (std::abs(r.trace_gap) > tol) {
    r.relation = Relation::Weak;
  } else {
    bool strict = true;
    for (int k = 1; k < n; ++k) strict = strict && r.gap(k) > tol;
    r.relation = strict ? Relation::Strict : Relation::Exact;
  }
  return r;
}

MajorizationReport classify(const HermitianOperator& a, const HermitianOperator& s, double tol) {
  if (a.n() != s.n()) fail(ErrorKind::ResolutionMismatch, "operands have different sizes");
  return classify(spectral_scale(a), spectral_scale(s), tol);
}

double slack(const SpectralScale& fa, const SpectralScale& fs) {
  if (fa.n() != fs.n()) fail(ErrorKind::ResolutionMismatch, "scales live on different grids");
  return (ky_fan(fs).samples - ky_fan(fa).samples).minCoeff();
}

double slack(const HermitianOperator& a, const HermitianOperator& s) {
  if (a.n() != s.n()) fail(ErrorKind::ResolutionMismatch, "operands have different sizes");
  return slack(spectral_scale(a), spectral_scale(s));
}

double slack_block_formula(std::span<const Block> blocks, double tol) {
  if (blocks.empty()) fail(ErrorKind::InvalidInput, "no blocks");
  int total = 0;
  std::vector<SpectralScale> fa, fs;
  for (const Block& b : blocks) {
    if (b.a.n() != b.s.n()) fail(ErrorKind::ResolutionMismatch, "block operands differ in size");
    total += b.a.n();
    fa.push_back(spectral_scale(b.a));
    fs.push_back(spectral_scale(b.s));
  }
  for (std::size_t m = 0; m + 1 < blocks.size(); ++m) {
    if (fa[m].values.minCoeff() < fa[m + 1].values.maxCoeff() - tol)
      fail(ErrorKind::Precondition, "A-blocks are not spectrally ordered at block " + std::to_string(m));
    if (fs[m].values.minCoeff() < fs[m + 1].values.maxCoeff() - tol)
      fail(ErrorKind::Precondition, "S-blocks are not spectrally ordered at block " + std::to_string(m));
  }
  double best = 0.0;
  double head = 0.0;  // tau((S - A) Q_{m-1}) in the ambient trace
  for (std::size_t m = 0; m < blocks.size(); ++m) {
    const double w = static_cast<double>(fa[m].n()) / total;
    const double local = w * slack(fa[m], fs[m]);
    best = m == 0 ? head + local : std::min(best, head + local);
    head += w * (fs[m].values.mean() - fa[m].values.mean());
  }
  return best;
}

HermitianOperator assemble(std::span<const HermitianOperator> blocks) {
  int n = 0;
  for (const auto& b : blocks) n += b.n();
  Matrix m = Matrix::Zero(n, n);
  int at = 0;
  for (const auto& b : blocks) {
    m.block(at, at, b.n(), b.n()) = b.matrix();
    at += b.n();
  }
  return HermitianOperator(std::move(m));
}

namespace {

bool interior_positive(const RealVector& gap, double tol) {
  for (Eigen::Index k = 1; k + 1 < gap.size(); ++k)
    if (gap(k) <= tol) return false;
  return true;
}

}  // namespace

BlockReplacementCheck verify_block_majorization(const BlockReplacement& d, double tol) {
  BlockReplacementCheck out;
  if (d.a1.n() != d.s1.n() || d.a2.n() != d.s2.n() || d.a3.n() != d.s3.n() || d.t.n() != d.s2.n())
    fail(ErrorKind::ResolutionMismatch, "block sizes differ between A, S and T");

  const auto lo = [](const HermitianOperator& x) { return spectral_scale(x).values.minCoeff(); };
  const auto hi = [](const HermitianOperator& x) { return spectral_scale(x).values.maxCoeff(); };
  const auto tr = [](const HermitianOperator& x) { return trace(x); };

  const std::vector<HermitianOperator> av{d.a1, d.a2, d.a3}, sv{d.s1, d.s2, d.s3}, rv{d.s1, d.t, d.s3};
  const HermitianOperator a = assemble(av), s = assemble(sv), r = assemble(rv);
  const int n = a.n();
  const double tp = static_cast<double>(d.a1.n()) / n;
  const double tq = static_cast<double>(d.a2.n()) / n;

  const MajorizationReport as = classify(a, s, tol);
  if (!as.majorized()) out.violations.push_back("A is not majorized by S");
  if (lo(d.a1) < hi(d.a2) - tol || lo(d.a2) < hi(d.a3) - tol)
    out.violations.push_back("ordering: A-blocks are not spectrally ordered");
  if (lo(d.s1) < hi(d.s2) - tol || lo(d.s2) < hi(d.s3) - tol)
    out.violations.push_back("ordering: S-blocks are not spectrally ordered");
  if (!(tr(d.s1) - tr(d.a1) > tq / tp))
    out.violations.push_back("gap: tau_P(S1 - A1) <= tau(Q)/tau(P)");
  if (std::abs(tr(d.t) - tr(d.s2)) > tol)
    out.violations.push_back("replacement T does not have the trace of S2");
  if (lo(d.s1) < hi(d.t) - tol || lo(d.t) < hi(d.s3) - tol)
    out.violations.push_back("replacement T is not sandwiched between S1 and S3");
  if (lo(d.t) < -tol) out.violations.push_back("replacement T is not positive");
  if (!out.ok()) return out;

  const MajorizationReport ar = classify(a, r, tol);
  out.majorized = ar.majorized();
  out.input_strict = std::abs(as.trace_gap) <= tol && interior_positive(as.gap, tol);
  out.replaced_strict = std::abs(ar.trace_gap) <= tol && interior_positive(ar.gap, tol);
  return out;
}

}  // namespace shorn::majorization
