#include "io/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace shorn::io {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) fail(ErrorKind::InvalidInput, std::string("missing field '") + name + "'");
  return j.at(name);
}

double real_of(const Json& j) {
  if (!j.is_number()) fail(ErrorKind::InvalidInput, "expected a number");
  return j.get<double>();
}

}  // namespace

std::string to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::Hermitian: return "hermitian";
    case MatrixKind::Diagonal: return "diagonal";
    case MatrixKind::Projection: return "projection";
    case MatrixKind::Unitary: return "unitary";
  }
  return "hermitian";
}

Json matrix_to_json(const Matrix& m, MatrixKind kind) {
  Json j;
  j["n"] = m.rows();
  j["kind"] = to_string(kind);
  Json e = Json::array();
  if (kind == MatrixKind::Diagonal) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) e.push_back(m(i, i).real());
  } else {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) e.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
  }
  j["entries"] = std::move(e);
  return j;
}

MatrixDocument matrix_from_json(const Json& j) {
  const Json& jn = field(j, "n");
  if (!jn.is_number_integer() || jn.get<long>() <= 0) fail(ErrorKind::InvalidInput, "'n' must be a positive integer");
  const auto n = static_cast<Eigen::Index>(jn.get<long>());
  const std::string kind = field(j, "kind").is_string() ? j.at("kind").get<std::string>() : "";
  MatrixDocument doc;
  if (kind == "hermitian")
    doc.kind = MatrixKind::Hermitian;
  else if (kind == "diagonal")
    doc.kind = MatrixKind::Diagonal;
  else if (kind == "projection")
    doc.kind = MatrixKind::Projection;
  else if (kind == "unitary")
    doc.kind = MatrixKind::Unitary;
  else
    fail(ErrorKind::InvalidInput, "unknown matrix kind '" + kind + "'");
  const Json& e = field(j, "entries");
  if (!e.is_array()) fail(ErrorKind::InvalidInput, "'entries' must be an array");
  doc.entries = Matrix::Zero(n, n);
  const bool flat = doc.kind == MatrixKind::Diagonal && e.size() == static_cast<std::size_t>(n) &&
                    (n == 0 || e.at(0).is_number());
  if (flat) {
    for (Eigen::Index i = 0; i < n; ++i) doc.entries(i, i) = real_of(e.at(static_cast<std::size_t>(i)));
  } else {
    if (e.size() != static_cast<std::size_t>(n * n))
      fail(ErrorKind::InvalidInput, "'entries' must hold n*n [re, im] pairs");
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) {
        const Json& z = e.at(static_cast<std::size_t>(r * n + c));
        if (!z.is_array() || z.size() != 2) fail(ErrorKind::InvalidInput, "matrix entries must be [re, im] pairs");
        doc.entries(r, c) = Complex(real_of(z.at(0)), real_of(z.at(1)));
      }
    if (doc.kind == MatrixKind::Diagonal) {
      Matrix off = doc.entries;
      off.diagonal().setZero();
      if (max_abs(off) > 0) fail(ErrorKind::InvalidInput, "matrix of kind 'diagonal' has off-diagonal entries");
    }
  }
  if (!doc.entries.allFinite()) fail(ErrorKind::InvalidInput, "matrix has non-finite entries");
  return doc;
}

Json vector_to_json(const RealVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

RealVector vector_from_json(const Json& j, const char* name) {
  const Json& a = field(j, name);
  if (!a.is_array()) fail(ErrorKind::InvalidInput, std::string("'") + name + "' must be an array");
  RealVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = real_of(a.at(i));
  return v;
}

Json instance_to_json(const oracle::InstanceSpec& spec) {
  Json j;
  j["n"] = spec.n;
  j["eigenvalues"] = vector_to_json(spec.eigenvalues);
  j["target_diagonal"] = vector_to_json(spec.target_diagonal);
  j["seed"] = spec.seed;
  j["transforms"] = spec.transforms;
  return j;
}

oracle::InstanceSpec instance_from_json(const Json& j) {
  oracle::InstanceSpec spec;
  const Json& jn = field(j, "n");
  if (!jn.is_number_integer() || jn.get<long>() <= 0) fail(ErrorKind::InvalidInput, "'n' must be a positive integer");
  spec.n = jn.get<int>();
  spec.eigenvalues = vector_from_json(j, "eigenvalues");
  spec.target_diagonal = vector_from_json(j, "target_diagonal");
  if (spec.eigenvalues.size() != spec.n || spec.target_diagonal.size() != spec.n)
    fail(ErrorKind::ResolutionMismatch, "instance vectors must have length n");
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("transforms")) spec.transforms = j.at("transforms").get<int>();
  return spec;
}

Json measure_to_json(const choquet::AtomicMeasure& mu) {
  Json a = Json::array();
  for (const auto& x : mu.atoms) a.push_back(Json::array({x.value, x.mass}));
  return Json{{"atoms", a}};
}

choquet::AtomicMeasure measure_from_json(const Json& j) {
  const Json& a = field(j, "atoms");
  if (!a.is_array()) fail(ErrorKind::InvalidInput, "'atoms' must be an array");
  choquet::AtomicMeasure mu;
  for (const Json& x : a) {
    if (!x.is_array() || x.size() != 2) fail(ErrorKind::InvalidInput, "atoms must be [value, mass] pairs");
    mu.atoms.push_back({real_of(x.at(0)), real_of(x.at(1))});
  }
  return mu;
}

std::string scale_csv(const majorization::SpectralScale& f) {
  std::ostringstream os;
  os << "t,f\n";
  for (int k = 0; k < f.n(); ++k) os << num(static_cast<double>(k) / f.n()) << ',' << num(f.values(k)) << '\n';
  return os.str();
}

std::string report_csv(const majorization::SpectralScale& fa, const majorization::SpectralScale& fs) {
  const RealVector ca = majorization::ky_fan(fa).samples, cs = majorization::ky_fan(fs).samples;
  std::ostringstream os;
  os << "t,F_A,F_S,gap\n";
  for (Eigen::Index k = 0; k < ca.size(); ++k)
    os << num(static_cast<double>(k) / fa.n()) << ',' << num(ca(k)) << ',' << num(cs(k)) << ',' << num(cs(k) - ca(k)) << '\n';
  return os.str();
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + p.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json(const std::filesystem::path& p) {
  try {
    return Json::parse(read_text(p));
  } catch (const Json::exception& e) {
    fail(ErrorKind::InvalidInput, "'" + p.string() + "' is not valid JSON: " + e.what());
  }
}

void write_atomic(const std::filesystem::path& p, const std::string& content) {
  const std::filesystem::path tmp = p.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::Io, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(ErrorKind::Io, "cannot move output into '" + p.string() + "': " + ec.message());
  }
}

}  // namespace shorn::io
