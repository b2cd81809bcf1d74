#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "shorn/choquet.hpp"
#include "shorn/core.hpp"
#include "shorn/majorization.hpp"
#include "shorn/oracle.hpp"

namespace shorn::io {

using Json = nlohmann::json;

enum class MatrixKind { Hermitian, Diagonal, Projection, Unitary };
std::string to_string(MatrixKind k);

struct MatrixDocument {
  MatrixKind kind = MatrixKind::Hermitian;
  Matrix entries;
};

// {"n": n, "kind": ..., "entries": [[re, im], ...]} row-major, or a flat
// list of n reals for kind "diagonal".
Json matrix_to_json(const Matrix& m, MatrixKind kind);
MatrixDocument matrix_from_json(const Json& j);

Json vector_to_json(const RealVector& v);
RealVector vector_from_json(const Json& j, const char* field);

// {"n", "eigenvalues", "target_diagonal", "seed"}; an optional "source"
// matrix document replaces diag(eigenvalues) as S.
Json instance_to_json(const oracle::InstanceSpec& spec);
oracle::InstanceSpec instance_from_json(const Json& j);

// {"atoms": [[value, mass], ...]}
Json measure_to_json(const choquet::AtomicMeasure& mu);
choquet::AtomicMeasure measure_from_json(const Json& j);

// "t,f" with one row per step.
std::string scale_csv(const majorization::SpectralScale& f);
// "t,F_A,F_S,gap" with n+1 rows.
std::string report_csv(const majorization::SpectralScale& fa, const majorization::SpectralScale& fs);

std::string read_text(const std::filesystem::path& p);
Json read_json(const std::filesystem::path& p);
// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& p, const std::string& content);

}  // namespace shorn::io
