#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gerf/core.hpp"

namespace gerf {

/// ADMM iterate: primal x, auxiliary theta, dual beta.
struct InnerState {
  Vector x;
  Vector theta;
  Vector beta;
  std::size_t iterations = 0;  ///< iterations run by the call that produced this state

  static InnerState zeros(std::size_t n);
};

struct SolverReport {
  RecoveryResult result;
  std::vector<std::size_t> inner_iter_counts;
  Vector final_weights_or_v;
};

/// Factored (A^T A + rho I) together with A^T for one (A, rho) pair.
/// Immutable after construction; share it freely across threads.
class NormalSystem {
 public:
  NormalSystem(const DenseMatrix& A, double rho);

  std::size_t size() const { return static_cast<std::size_t>(inverse_.rows()); }
  double rho() const { return rho_; }
  /// (A^T A + rho I)^{-1} b
  Vector solve(const Vector& b) const { return inverse_ * b; }

 private:
  double rho_;
  Eigen::MatrixXd inverse_;
};

/// Process-wide cache keyed on the contents of A and rho.
std::shared_ptr<const NormalSystem> normal_system(const DenseMatrix& A, double rho);

/// ADMM for min 1/2 ||y - Ax||^2 + lambda sum_j w_j |x_j| with splitting x = theta:
///   x     <- S_{lambda w / rho}(theta - beta)
///   theta <- (A^T A + rho I)^{-1}(A^T y + rho x + rho beta)
///   beta  <- beta + x - theta
/// Stops after inner_max iterations or once ||x - theta|| and the change in
/// theta both drop below 1e-10.
InnerState admm_weighted_l1(const DenseMatrix& A, const Vector& y, const Vector& w, double lambda, double rho,
                            std::size_t inner_max, const std::optional<InnerState>& warm = std::nullopt);

/// ADMM for min 1/2 ||y - Ax||^2 + lambda ||x||_1 + <v, x>:
///   x     <- (A^T A + rho I)^{-1}(A^T y - v + rho theta - beta)
///   theta <- S_{lambda / rho}(x + beta / rho)
///   beta  <- beta + rho (x - theta)
InnerState admm_l1_linear(const DenseMatrix& A, const Vector& y, double lambda, const Vector& v, double rho,
                          std::size_t inner_max, const std::optional<InnerState>& warm = std::nullopt);

/// 1/2 ||y - Ax||^2 + lambda * penalty(x)
double objective(const ProblemInstance& instance, const PenaltySpec& spec, double lambda, const Vector& x);

/// Iteratively reweighted l1. The first outer step uses unit weights; later
/// steps use irl1_weight of the previous iterate.
SolverReport irl1_solve(const ProblemInstance& instance, const PenaltySpec& spec, const SolverConfig& cfg);

/// Difference-of-convex iteration from x = 0; each step solves the l1 problem
/// linearized with v = -lambda * dc_gradient(x_k).
SolverReport dca_solve(const ProblemInstance& instance, double p, double sigma, const SolverConfig& cfg);

/// ADMM-Lasso baseline: the IRL1 shell with unit weights.
SolverReport lasso_admm(const ProblemInstance& instance, const SolverConfig& cfg);

}  // namespace gerf
