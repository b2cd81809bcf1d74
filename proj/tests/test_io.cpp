#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "io/io.hpp"
#include "shorn/error.hpp"

using namespace shorn;
using namespace shorn::io;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Precondition;
}

}  // namespace

TEST(MatrixJson, HermitianRoundTrip) {
  oracle::Rng rng(101);
  const Matrix m = oracle::random_psd(5, rng).matrix();
  const Json j = matrix_to_json(m, MatrixKind::Hermitian);
  EXPECT_EQ(j.at("n"), 5);
  EXPECT_EQ(j.at("kind"), "hermitian");
  EXPECT_EQ(j.at("entries").size(), 25u);
  const MatrixDocument d = matrix_from_json(Json::parse(j.dump()));
  EXPECT_EQ(d.kind, MatrixKind::Hermitian);
  EXPECT_EQ(max_abs(d.entries - m), 0.0);
}

TEST(MatrixJson, DiagonalFlatReals) {
  const Json j = Json::parse(R"({"n": 3, "kind": "diagonal", "entries": [3, 1, 0]})");
  const MatrixDocument d = matrix_from_json(j);
  EXPECT_EQ(d.kind, MatrixKind::Diagonal);
  EXPECT_EQ(d.entries(0, 0).real(), 3.0);
  EXPECT_EQ(d.entries(1, 1).real(), 1.0);
  EXPECT_EQ(matrix_to_json(d.entries, MatrixKind::Diagonal).at("entries"), j.at("entries"));
}

TEST(MatrixJson, Rejects) {
  EXPECT_EQ(kind_of([] { matrix_from_json(Json::parse(R"({"n": 2, "kind": "weird", "entries": []})")); }),
            ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { matrix_from_json(Json::parse(R"({"n": 2, "kind": "hermitian", "entries": [[1,0]]})")); }),
            ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { matrix_from_json(Json::parse(R"({"kind": "hermitian", "entries": []})")); }),
            ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { matrix_from_json(Json::parse(R"({"n": -1, "kind": "diagonal", "entries": []})")); }),
            ErrorKind::InvalidInput);
}

TEST(InstanceJson, RoundTrip) {
  const oracle::InstanceSpec s = oracle::generate_instance(7, 42);
  const oracle::InstanceSpec t = instance_from_json(Json::parse(instance_to_json(s).dump()));
  EXPECT_EQ(t.n, 7);
  EXPECT_EQ(t.seed, 42u);
  EXPECT_EQ(t.eigenvalues, s.eigenvalues);
  EXPECT_EQ(t.target_diagonal, s.target_diagonal);
}

TEST(InstanceJson, LengthMismatch) {
  EXPECT_EQ(kind_of([] {
              instance_from_json(Json::parse(R"({"n": 3, "eigenvalues": [1, 2], "target_diagonal": [1, 1, 1]})"));
            }),
            ErrorKind::ResolutionMismatch);
}

TEST(MeasureJson, RoundTrip) {
  const choquet::AtomicMeasure mu{{{3.0, 0.25}, {1.0, 0.75}}};
  const choquet::AtomicMeasure nu = measure_from_json(Json::parse(measure_to_json(mu).dump()));
  ASSERT_EQ(nu.atoms.size(), 2u);
  EXPECT_EQ(nu.atoms[1].value, 1.0);
  EXPECT_EQ(nu.atoms[1].mass, 0.75);
}

TEST(Csv, ScaleAndReport) {
  const auto f = majorization::scale_from_values(RealVector{{1.0, 3.0}});
  EXPECT_EQ(scale_csv(f), "t,f\n0,3\n0.5,1\n");
  const auto g = majorization::scale_from_values(RealVector{{2.0, 2.0}});
  EXPECT_EQ(report_csv(g, f), "t,F_A,F_S,gap\n0,0,0,0\n0.5,1,1.5,0.5\n1,2,2,0\n");
}

TEST(Files, AtomicWriteAndRead) {
  const fs::path dir = fs::temp_directory_path() / "shorn_io_test";
  fs::create_directories(dir);
  const fs::path p = dir / "x.json";
  write_atomic(p, "{\"a\": 1}\n");
  EXPECT_EQ(read_json(p).at("a"), 1);
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().filename(), "x.json");
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_EQ(kind_of([&] { read_json(dir / "bad.json"); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([&] { read_text(dir / "missing"); }), ErrorKind::Io);
  fs::remove_all(dir);
}
