#include "gerf/generators.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "gerf/rng.hpp"

namespace gerf {

DenseMatrix gen_gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0) throw ContractError("gen_gaussian_matrix: dimensions must be positive");
  Rng rng(seed);
  RowMatrix A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
  return DenseMatrix(std::move(A));
}

DenseMatrix gen_oversampled_dct(std::size_t m, std::size_t n, double F, std::uint64_t seed) {
  if (m == 0 || n == 0) throw ContractError("gen_oversampled_dct: dimensions must be positive");
  if (!(F > 0.0)) throw ContractError("gen_oversampled_dct: F must be positive");
  Rng rng(seed);
  Vector w(static_cast<Eigen::Index>(m));
  for (auto& wi : w) wi = rng.uniform();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  RowMatrix A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      A(i, j) = scale * std::cos(2.0 * std::numbers::pi * w[i] * static_cast<double>(j) / F);
  return DenseMatrix(std::move(A));
}

Vector gen_sparse_signal(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) throw ContractError("gen_sparse_signal: k exceeds N");
  Rng rng(seed);
  // Partial Fisher-Yates: the first k entries become a uniform k-subset.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < k; ++i) {
    double value = 0.0;
    while (value == 0.0) value = rng.normal();
    x[static_cast<Eigen::Index>(idx[i])] = value;
  }
  return x;
}

double mutual_coherence(const DenseMatrix& A) {
  Eigen::MatrixXd cols = A.values();
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    const double norm = cols.col(j).norm();
    if (norm > 0.0) cols.col(j) /= norm;
  }
  Eigen::MatrixXd gram = cols.transpose() * cols;
  gram.diagonal().setZero();
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace gerf
