#include "gerf/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace gerf::io {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'E', 'R', 'F', 'M', 'A', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) throw ContractError("GERFMAT1: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_matrix(std::ostream& out, const RowMatrix& m) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_u64(out, std::bit_cast<std::uint64_t>(m(r, c)));
  if (!out) throw ContractError("GERFMAT1: write failed");
}

RowMatrix read_matrix(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), 8) || magic != kMagic) throw ContractError("GERFMAT1: bad magic");
  const auto rows = get_u64(in);
  const auto cols = get_u64(in);
  if (rows > (1ULL << 28) || cols > (1ULL << 28) || rows * cols > (1ULL << 30))
    throw ContractError("GERFMAT1: implausible dimensions");
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = std::bit_cast<double>(get_u64(in));
  return m;
}

void save_matrix(const std::string& path, const RowMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot open '" + path + "' for writing");
  write_matrix(out, m);
}

RowMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open '" + path + "'");
  return read_matrix(in);
}

void save_vector(const std::string& path, const Vector& v) { save_matrix(path, RowMatrix(v)); }

Vector load_vector(const std::string& path) {
  const RowMatrix m = load_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ContractError("'" + path + "' holds a matrix, expected a vector");
}

}  // namespace gerf::io
