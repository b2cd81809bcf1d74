// Command-line front end.  Exit codes: 0 ok, 1 contract failure,
// 2 invalid input, 3 iteration exhaustion.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "io/io.hpp"
#include "shorn/choquet.hpp"
#include "shorn/majorization.hpp"
#include "shorn/oracle.hpp"
#include "shorn/solver.hpp"

namespace fs = std::filesystem;
using namespace shorn;
using io::Json;

namespace {

struct Options {
  int n = 0;
  std::uint64_t seed = 0;
  int transforms = -1;
  double tol = 1e-8;
  std::string mode = "exact";
  int max_iters = 0;
  int refine_cap = 64;
  std::vector<std::string> inputs;
  std::string output;
  std::string report;
};

constexpr int kOk = 0, kContract = 1, kInvalid = 2, kExhausted = 3;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::ResolutionMismatch:
    case ErrorKind::Io: return kInvalid;
    case ErrorKind::IterationLimit: return kExhausted;
    default: return kContract;
  }
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    io::write_atomic(path, content);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

solver::SolveConfig config(const Options& o) {
  if (!(o.tol > 0)) fail(ErrorKind::InvalidInput, "--tol must be positive");
  if (o.max_iters < 0) fail(ErrorKind::InvalidInput, "--max-iters must be non-negative");
  solver::SolveConfig cfg;
  cfg.tol = o.tol;
  cfg.max_outer_iterations = o.max_iters;
  cfg.rng_seed = o.seed;
  return cfg;
}

const std::string& single_input(const Options& o) {
  if (o.inputs.size() != 1) fail(ErrorKind::InvalidInput, "exactly one --input is required");
  return o.inputs.front();
}

// Target A and source S of an instance document.
std::pair<HermitianOperator, HermitianOperator> operands(const Json& j) {
  const oracle::InstanceSpec spec = io::instance_from_json(j);
  HermitianOperator a = HermitianOperator::diagonal(spec.target_diagonal);
  if (j.contains("source")) {
    const io::MatrixDocument d = io::matrix_from_json(j.at("source"));
    if (d.entries.rows() != spec.n) fail(ErrorKind::ResolutionMismatch, "source has the wrong size");
    return {a, HermitianOperator(d.entries)};
  }
  return {a, HermitianOperator::diagonal(spec.eigenvalues)};
}

Json failure(const std::string& invariant, double measured, double bound) {
  return Json{{"status", "failed"}, {"invariant", invariant}, {"measured", measured}, {"bound", bound}};
}

int cmd_scale(const Options& o) {
  const io::MatrixDocument d = io::matrix_from_json(io::read_json(single_input(o)));
  emit(o.output, io::scale_csv(majorization::spectral_scale(HermitianOperator(d.entries))));
  return kOk;
}

int cmd_classify(const Options& o) {
  const Json in = io::read_json(single_input(o));
  const auto [a, s] = operands(in);
  const auto fa = majorization::spectral_scale(a), fs = majorization::spectral_scale(s);
  const auto rep = majorization::classify(fa, fs, o.tol);
  Json out{{"relation", majorization::to_string(rep.relation)},
           {"slack", rep.slack},
           {"trace_gap", rep.trace_gap},
           {"n", a.n()},
           {"tol", o.tol},
           {"instance", in}};
  emit(o.output, dump(out));
  if (!o.report.empty()) io::write_atomic(o.report, io::report_csv(fa, fs));
  return kOk;
}

Json solve_one(const Json& in, const Options& o, int& status) {
  const auto [a, s] = operands(in);
  const solver::SolveConfig cfg = config(o);
  Json out{{"mode", o.mode}, {"n", a.n()}, {"tol", o.tol}};
  Matrix u;
  if (o.mode == "exact") {
    const solver::ExactResult r = solver::solve_exact(a, s, cfg);
    u = r.u;
    out["residual"] = r.residual;
    out["iterations"] = r.iterations;
    out["tau_P_history"] = r.tau_p_history;
  } else if (o.mode == "orbit") {
    const solver::OrbitResult r = solver::solve_orbit(a, s, cfg);
    u = r.solution;
    out["residual"] = r.residual;
    out["iterations"] = r.iterations;
    out["tau_P_history"] = r.tau_p_history;
    if (!r.converged) status = std::max(status, kExhausted);
  } else {
    fail(ErrorKind::InvalidInput, "--mode must be 'orbit' or 'exact'");
  }
  out["unitary"] = io::matrix_to_json(u, io::MatrixKind::Unitary);
  out["target_diagonal"] = io::vector_to_json(a.diagonal_values());
  out["source"] = io::matrix_to_json(s.matrix(), io::MatrixKind::Hermitian);
  if (out["residual"].get<double>() > o.tol) status = std::max(status, kContract);
  return out;
}

int cmd_solve(const Options& o) {
  if (o.inputs.empty()) fail(ErrorKind::InvalidInput, "--input is required");
  int status = kOk;
  if (o.inputs.size() == 1) {
    const Json out = solve_one(io::read_json(o.inputs.front()), o, status);
    emit(o.output, dump(out));
    return status;
  }
  // Batch: one result per input, written next to each other in --output.
  if (o.output.empty()) fail(ErrorKind::InvalidInput, "batch solving needs an --output directory");
  fs::create_directories(o.output);
  for (const std::string& p : o.inputs) {
    int st = kOk;
    Json out;
    try {
      out = solve_one(io::read_json(p), o, st);
    } catch (const Error& e) {
      st = exit_code(e.kind());
      out = Json{{"status", "error"}, {"message", e.what()}};
    }
    io::write_atomic(fs::path(o.output) / (fs::path(p).stem().string() + ".result.json"), dump(out));
    std::cerr << p << ": " << (st == kOk ? "ok" : "exit " + std::to_string(st)) << '\n';
    status = std::max(status, st);
  }
  return status;
}

int cmd_carpenter(const Options& o) {
  const Json in = io::read_json(single_input(o));
  RealVector d = in.contains("kind") ? io::matrix_from_json(in).entries.diagonal().real().eval()
                                     : io::vector_from_json(in, "d");
  const solver::CarpenterResult r = solver::carpenter(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())), config(o));
  Json out = io::matrix_to_json(r.projection, io::MatrixKind::Projection);
  out["target_diagonal"] = io::vector_to_json(d);
  out["rank"] = r.rank;
  out["residual"] = r.residual;
  emit(o.output, dump(out));
  return r.residual <= o.tol && r.idempotence <= 1e-9 ? kOk : kContract;
}

int cmd_split(const Options& o) {
  const Json in = io::read_json(single_input(o));
  if (in.contains("target_diagonal")) {
    // Finite-spectrum route on an instance document.
    const auto [a, s] = operands(in);
    const choquet::FiniteSpectrumResult r = choquet::finite_spectrum_solve(a, s, config(o), o.refine_cap);
    Json parts = Json::array();
    for (const auto& p : r.parts) parts.push_back(io::measure_to_json(p));
    Json out{{"mode", "finite-spectrum"},
             {"n", r.target.size()},
             {"refinement", r.refinement},
             {"residual", r.residual},
             {"iterations", 0},
             {"tau_P_history", Json::array()},
             {"measures", parts},
             {"unitary", io::matrix_to_json(r.u, io::MatrixKind::Unitary)},
             {"target_diagonal", io::vector_to_json(r.target)},
             {"source", io::matrix_to_json(r.source, io::MatrixKind::Hermitian)}};
    emit(o.output, dump(out));
    return r.residual <= o.tol ? kOk : kContract;
  }
  const choquet::AtomicMeasure mu = io::measure_from_json(in);
  std::vector<choquet::TargetPart> targets;
  const Json& jt = in.contains("targets") ? in.at("targets") : Json();
  if (!jt.is_array()) fail(ErrorKind::InvalidInput, "'targets' must be an array of [mass, mean] pairs");
  for (const Json& t : jt) {
    if (!t.is_array() || t.size() != 2) fail(ErrorKind::InvalidInput, "targets must be [mass, mean] pairs");
    targets.push_back({t.at(0).get<double>(), t.at(1).get<double>()});
  }
  const auto parts = choquet::measure_split(mu, targets, o.tol);
  Json ms = Json::array();
  for (const auto& p : parts) ms.push_back(io::measure_to_json(p));
  emit(o.output, dump(Json{{"measures", ms}, {"source", io::measure_to_json(mu)}, {"targets", jt}}));
  return kOk;
}

int cmd_generate(const Options& o) {
  if (o.n <= 0) fail(ErrorKind::InvalidInput, "--n must be positive");
  emit(o.output, dump(io::instance_to_json(oracle::generate_instance(o.n, o.seed, o.transforms))));
  return kOk;
}

// Re-checks an artifact against the contract it claims.
Json verify(const Json& j, double tol) {
  const auto ok = [](const std::string& what) { return Json{{"status", "ok"}, {"artifact", what}}; };
  if (j.contains("unitary")) {
    const Matrix u = io::matrix_from_json(j.at("unitary")).entries;
    const RealVector a = io::vector_from_json(j, "target_diagonal");
    const Matrix s = io::matrix_from_json(j.at("source")).entries;
    if (u.rows() != a.size() || s.rows() != a.size()) return failure("shape", 1, 0);
    const double unit = unitarity_defect(u);
    if (unit > 1e-9) return failure("unitarity", unit, 1e-9);
    const Matrix t = u * s * u.adjoint();
    const double diag = (t.diagonal().real() - a).cwiseAbs().maxCoeff();
    if (diag > tol) return failure("diagonal", diag, tol);
    const RealVector e1 = spectral_decomposition(HermitianOperator(t, 1e-8)).values;
    const RealVector e2 = spectral_decomposition(HermitianOperator(s)).values;
    const double spec = (e1 - e2).cwiseAbs().maxCoeff();
    if (spec > 1e-9 * std::max(1.0, e2.cwiseAbs().maxCoeff())) return failure("spectrum", spec, 1e-9);
    if (j.contains("residual") && std::abs(j.at("residual").get<double>() - diag) > 1e-12 + 1e-6 * diag)
      return failure("reported-residual", std::abs(j.at("residual").get<double>() - diag), 1e-12);
    return ok("solve-result");
  }
  if (j.contains("measures")) {
    const choquet::AtomicMeasure mu = io::measure_from_json(j.at("source"));
    const Json& jt = j.at("targets");
    const Json& ms = j.at("measures");
    if (!ms.is_array() || !jt.is_array() || ms.size() != jt.size()) return failure("part-count", 1, 0);
    double cons = 0.0;
    for (const auto& atom : mu.atoms) {
      double got = 0.0;
      for (const Json& p : ms)
        for (const auto& x : io::measure_from_json(p).atoms)
          if (x.value == atom.value) got += x.mass;
      double want = 0.0;
      for (const auto& y : mu.atoms)
        if (y.value == atom.value) want += y.mass;
      cons = std::max(cons, std::abs(got - want));
    }
    if (cons > 1e-12) return failure("mass-conservation", cons, 1e-12);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const auto p = io::measure_from_json(ms[i]);
      const double dm = std::abs(p.mass() - jt[i][0].get<double>());
      if (dm > tol) return failure("part-mass", dm, tol);
      const double dmu = std::abs(p.mean() - jt[i][1].get<double>());
      if (dmu > tol) return failure("part-mean", dmu, tol);
    }
    return ok("split");
  }
  if (j.contains("kind")) {
    const io::MatrixDocument d = io::matrix_from_json(j);
    if (d.kind == io::MatrixKind::Unitary) {
      const double unit = unitarity_defect(d.entries);
      if (unit > 1e-9) return failure("unitarity", unit, 1e-9);
      return ok("unitary");
    }
    const double herm = max_abs(d.entries - d.entries.adjoint());
    if (herm > 1e-9) return failure("hermitian", herm, 1e-9);
    if (d.kind == io::MatrixKind::Projection) {
      const double idem = max_abs(d.entries * d.entries - d.entries);
      if (idem > 1e-9) return failure("idempotent", idem, 1e-9);
      if (j.contains("target_diagonal")) {
        const RealVector t = io::vector_from_json(j, "target_diagonal");
        const double diag = (d.entries.diagonal().real() - t).cwiseAbs().maxCoeff();
        if (diag > tol) return failure("diagonal", diag, tol);
      }
      return ok("projection");
    }
    return ok("matrix");
  }
  if (j.contains("relation")) {
    const auto [a, s] = operands(j.at("instance"));
    const auto rep = majorization::classify(a, s, j.value("tol", tol));
    if (majorization::to_string(rep.relation) != j.at("relation").get<std::string>())
      return failure("relation", 1, 0);
    if (std::abs(rep.slack - j.at("slack").get<double>()) > 1e-12) return failure("slack", std::abs(rep.slack - j.at("slack").get<double>()), 1e-12);
    return ok("classify-report");
  }
  if (j.contains("target_diagonal")) {
    const oracle::InstanceSpec spec = io::instance_from_json(j);
    if (!oracle::classically_majorized(spec.eigenvalues, spec.target_diagonal, tol))
      return failure("majorized", 1, 0);
    return ok("instance");
  }
  fail(ErrorKind::InvalidInput, "unrecognized artifact");
}

std::vector<std::vector<double>> csv_rows(std::istringstream& in, std::size_t width) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != width) fail(ErrorKind::InvalidInput, "ragged CSV row");
    rows.push_back(std::move(row));
  }
  return rows;
}

// Scale CSV: non-increasing steps on the left-closed grid.  Report CSV:
// both curves start at 0, are concave, and gap = F_S - F_A.
Json verify_csv(const std::string& text, double tol) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  const auto ok = [](const std::string& what) { return Json{{"status", "ok"}, {"artifact", what}}; };
  if (header == "t,f") {
    const auto rows = csv_rows(in, 2);
    const double n = static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (std::abs(rows[i][0] - static_cast<double>(i) / n) > 1e-15) return failure("grid", rows[i][0], 0);
      if (i > 0 && rows[i][1] > rows[i - 1][1]) return failure("non-increasing", rows[i][1] - rows[i - 1][1], 0);
    }
    return ok("scale");
  }
  if (header == "t,F_A,F_S,gap") {
    const auto rows = csv_rows(in, 4);
    if (rows.size() < 2) return failure("rows", static_cast<double>(rows.size()), 2);
    if (rows.front()[1] != 0.0 || rows.front()[2] != 0.0) return failure("origin", 1, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double g = std::abs(rows[i][3] - (rows[i][2] - rows[i][1]));
      if (g > 1e-12) return failure("gap", g, 1e-12);
      if (i >= 2)
        for (int c : {1, 2}) {
          const double bend = (rows[i][c] - rows[i - 1][c]) - (rows[i - 1][c] - rows[i - 2][c]);
          if (bend > tol) return failure("concave", bend, tol);
        }
    }
    return ok("ky-fan-report");
  }
  fail(ErrorKind::InvalidInput, "unrecognized CSV header '" + header + "'");
}

int cmd_verify(const Options& o) {
  const std::string text = io::read_text(single_input(o));
  const Json parsed = Json::parse(text, nullptr, false);
  const Json res = parsed.is_discarded() ? verify_csv(text, o.tol) : verify(parsed, o.tol);
  std::cout << res.dump() << '\n';
  return res.at("status") == "ok" ? kOk : kContract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schur-Horn solver for diagonal masas at finite resolution"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* c) {
    c->add_option("--input", o.inputs, "input file(s)");
    c->add_option("--output", o.output, "output path (stdout if omitted)");
    c->add_option("--tol", o.tol, "tolerance")->capture_default_str();
  };
  auto* scale = app.add_subcommand("scale", "spectral scale of a matrix as CSV");
  common(scale);
  auto* classify = app.add_subcommand("classify", "majorization relation of an instance");
  common(classify);
  classify->add_option("--report", o.report, "Ky Fan gap CSV");
  auto* solve = app.add_subcommand("solve", "find U with diag(U S U*) = A");
  common(solve);
  solve->add_option("--mode", o.mode, "orbit or exact")->capture_default_str();
  solve->add_option("--max-iters", o.max_iters, "outer iteration budget (0: 64 log2 n)");
  auto* carp = app.add_subcommand("carpenter", "projection with a prescribed diagonal");
  common(carp);
  auto* split = app.add_subcommand("split", "split a measure, or run the finite-spectrum route");
  common(split);
  split->add_option("--refine-cap", o.refine_cap, "largest refinement factor")->capture_default_str();
  auto* gen = app.add_subcommand("generate", "random majorized instance");
  gen->add_option("--n", o.n, "size")->required();
  gen->add_option("--seed", o.seed, "seed")->capture_default_str();
  gen->add_option("--transforms", o.transforms, "number of T-transforms (default 2n)");
  gen->add_option("--output", o.output, "output path (stdout if omitted)");
  auto* ver = app.add_subcommand("verify", "re-check an artifact");
  common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*scale) return cmd_scale(o);
    if (*classify) return cmd_classify(o);
    if (*solve) return cmd_solve(o);
    if (*carp) return cmd_carpenter(o);
    if (*split) return cmd_split(o);
    if (*gen) return cmd_generate(o);
    if (*ver) return cmd_verify(o);
  } catch (const Error& e) {
    std::cout << Json{{"status", "error"}, {"message", e.what()}}.dump() << '\n';
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    std::cout << Json{{"status", "error"}, {"message", e.what()}}.dump() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cout << Json{{"status", "error"}, {"message", e.what()}}.dump() << '\n';
    return kContract;
  }
  return kInvalid;
}
