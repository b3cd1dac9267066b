#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gerf {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Image = RowMatrix;  // n x n, row index = vertical position

// Error hierarchy shared by every module.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FactorizationError : NumericalError {
  using NumericalError::NumericalError;
};

/// Row-major dense matrix with finite entries.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  explicit DenseMatrix(RowMatrix values);

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  const RowMatrix& values() const { return values_; }
  double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }

 private:
  RowMatrix values_;
};

/// y = A x + noise, with optional ground truth for evaluation.
struct ProblemInstance {
  DenseMatrix A;
  Vector y;
  std::optional<Vector> truth;
  std::optional<double> noise_sd;

  static ProblemInstance make(DenseMatrix A, Vector y, std::optional<Vector> truth = std::nullopt,
                              std::optional<double> noise_sd = std::nullopt);
};

namespace penalties {
struct Gerf {
  double p;
  double sigma;
};
struct L1 {};
struct Lp {
  double p;
  double eps = 1e-6;
};
struct TL1 {
  double a;
};
}  // namespace penalties

struct PenaltySpec {
  std::variant<penalties::Gerf, penalties::L1, penalties::Lp, penalties::TL1> kind;

  static PenaltySpec gerf(double p, double sigma);
  static PenaltySpec l1();
  static PenaltySpec lp(double p, double eps = 1e-6);
  static PenaltySpec tl1(double a);

  bool is_gerf() const { return std::holds_alternative<penalties::Gerf>(kind); }
  const penalties::Gerf& as_gerf() const;
  /// Short label such as "gerf:p=2,sigma=0.5" or "lasso".
  std::string label() const;
  /// Parses the label syntax used on the command line.
  static PenaltySpec parse(const std::string& text);
};

struct SolverConfig {
  double lambda = 1e-5;
  double rho = 1e-3;  // suits the default lambda; keep rho near 100 * lambda
  std::size_t outer_max = 10;
  std::size_t inner_max = 512;
  double outer_tol = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RecoveryResult {
  Vector estimate;
  std::size_t outer_iters = 0;
  std::vector<double> objective_trace;
  bool converged = false;
  double wall_time = 0.0;
};

/// Cholesky factor of a symmetric positive-definite matrix, reusable across solves.
class CholeskySolver {
 public:
  explicit CholeskySolver(const Eigen::MatrixXd& G);
  Vector solve(const Vector& b) const;
  std::size_t size() const { return static_cast<std::size_t>(llt_.rows()); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Solves G v = b, caching the factorization of G by content.
Vector cholesky_cached_solve(const Eigen::MatrixXd& G, const Vector& b);

/// ||x_hat - x|| / ||x|| (Euclidean for vectors, Frobenius for images).
double relative_error(const Vector& x_hat, const Vector& x);
double relative_error(const RowMatrix& x_hat, const RowMatrix& x);

}  // namespace gerf
