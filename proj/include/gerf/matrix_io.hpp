#pragma once

#include <iosfwd>
#include <string>

#include "gerf/core.hpp"

namespace gerf::io {

// Binary layout: "GERFMAT1", rows (u64 LE), cols (u64 LE), rows*cols float64 LE row-major.
// Vectors are stored with cols = 1.

void write_matrix(std::ostream& out, const RowMatrix& m);
RowMatrix read_matrix(std::istream& in);

void save_matrix(const std::string& path, const RowMatrix& m);
RowMatrix load_matrix(const std::string& path);

void save_vector(const std::string& path, const Vector& v);
/// Accepts any stored shape with one column or one row.
Vector load_vector(const std::string& path);

}  // namespace gerf::io
