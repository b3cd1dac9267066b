#include "gerf/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <list>
#include <mutex>

#include "gerf/penalty.hpp"
#include "gerf/prox.hpp"

namespace gerf {

InnerState InnerState::zeros(std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  return InnerState{Vector::Zero(size), Vector::Zero(size), Vector::Zero(size), 0};
}

NormalSystem::NormalSystem(const DenseMatrix& A, double rho) : rho_(rho) {
  if (!(rho > 0.0)) throw ContractError("NormalSystem: rho must be positive");
  const auto n = static_cast<Eigen::Index>(A.cols());
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n, n) * rho;
  G.selfadjointView<Eigen::Lower>().rankUpdate(A.values().transpose());
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  const CholeskySolver factor(G);
  inverse_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) inverse_.col(j) = factor.solve(Vector::Unit(n, j));
  // Symmetrize so that repeated products stay exactly reproducible in either orientation.
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
}

namespace {

class NormalSystemCache {
 public:
  std::shared_ptr<const NormalSystem> get(const DenseMatrix& A, double rho) {
    const auto key = fingerprint(A, rho);
    {
      std::lock_guard lock(mutex_);
      for (const auto& entry : entries_) {
        if (entry.key == key && entry.rho == rho && entry.A.rows() == A.values().rows() &&
            entry.A.cols() == A.values().cols() && entry.A == A.values())
          return entry.system;
      }
    }
    auto system = std::make_shared<const NormalSystem>(A, rho);
    std::lock_guard lock(mutex_);
    entries_.push_front(Entry{key, rho, A.values(), system});
    if (entries_.size() > kCapacity) entries_.pop_back();
    return system;
  }

 private:
  struct Entry {
    std::uint64_t key;
    double rho;
    RowMatrix A;
    std::shared_ptr<const NormalSystem> system;
  };
  static constexpr std::size_t kCapacity = 32;

  static std::uint64_t fingerprint(const DenseMatrix& A, double rho) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double v) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h = (h ^ bits) * 1099511628211ULL;
    };
    mix(rho);
    mix(static_cast<double>(A.rows()));
    const RowMatrix& m = A.values();
    for (Eigen::Index i = 0; i < m.size(); ++i) mix(m.data()[i]);
    return h;
  }

  std::mutex mutex_;
  std::list<Entry> entries_;
};

void check_dims(const DenseMatrix& A, const Vector& y, const Vector& other, const char* what) {
  if (static_cast<std::size_t>(y.size()) != A.rows())
    throw ContractError(std::string(what) + ": y length does not match A rows");
  if (static_cast<std::size_t>(other.size()) != A.cols())
    throw ContractError(std::string(what) + ": vector length does not match A columns");
}

InnerState start_state(const std::optional<InnerState>& warm, std::size_t n, const char* what) {
  if (!warm) return InnerState::zeros(n);
  const auto size = static_cast<Eigen::Index>(n);
  if (warm->x.size() != size || warm->theta.size() != size || warm->beta.size() != size)
    throw ContractError(std::string(what) + ": warm state has wrong length");
  return *warm;
}

constexpr double kInnerTol = 1e-10;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool outer_converged(const Vector& next, const Vector& prev, double tol) {
  return (next - prev).norm() / std::max(prev.norm(), 1.0) < tol;
}

}  // namespace

std::shared_ptr<const NormalSystem> normal_system(const DenseMatrix& A, double rho) {
  static NormalSystemCache cache;
  return cache.get(A, rho);
}

InnerState admm_weighted_l1(const DenseMatrix& A, const Vector& y, const Vector& w, double lambda, double rho,
                            std::size_t inner_max, const std::optional<InnerState>& warm) {
  check_dims(A, y, w, "admm_weighted_l1");
  if (!(rho > 0.0) || !(lambda > 0.0)) throw ContractError("admm_weighted_l1: lambda and rho must be positive");
  if ((w.array() <= 0.0).any()) throw ContractError("admm_weighted_l1: weights must be strictly positive");
  const auto system = normal_system(A, rho);
  InnerState s = start_state(warm, A.cols(), "admm_weighted_l1");

  const Vector thresholds = (lambda / rho) * w;
  const Vector base = system->solve(A.values().transpose() * y);
  Vector theta_prev;
  s.iterations = 0;
  for (std::size_t t = 0; t < inner_max; ++t) {
    s.x = soft_threshold(s.theta - s.beta, thresholds);
    theta_prev.swap(s.theta);
    s.theta.noalias() = base + rho * system->solve(s.x + s.beta);
    s.beta += s.x - s.theta;
    ++s.iterations;
    if ((s.x - s.theta).norm() < kInnerTol && rho * (s.theta - theta_prev).norm() < kInnerTol) break;
  }
  return s;
}

InnerState admm_l1_linear(const DenseMatrix& A, const Vector& y, double lambda, const Vector& v, double rho,
                          std::size_t inner_max, const std::optional<InnerState>& warm) {
  check_dims(A, y, v, "admm_l1_linear");
  if (!(rho > 0.0) || !(lambda > 0.0)) throw ContractError("admm_l1_linear: lambda and rho must be positive");
  const auto system = normal_system(A, rho);
  InnerState s = start_state(warm, A.cols(), "admm_l1_linear");

  const Vector rhs = A.values().transpose() * y - v;
  const Vector base = system->solve(rhs);
  const double threshold = lambda / rho;
  Vector theta_prev;
  s.iterations = 0;
  for (std::size_t t = 0; t < inner_max; ++t) {
    s.x.noalias() = base + system->solve(rho * s.theta - s.beta);
    theta_prev.swap(s.theta);
    s.theta = soft_threshold(s.x + s.beta / rho, threshold);
    s.beta += rho * (s.x - s.theta);
    ++s.iterations;
    if ((s.x - s.theta).norm() < kInnerTol && rho * (s.theta - theta_prev).norm() < kInnerTol) break;
  }
  return s;
}

double objective(const ProblemInstance& instance, const PenaltySpec& spec, double lambda, const Vector& x) {
  const Vector r = instance.y - instance.A.values() * x;
  return 0.5 * r.squaredNorm() + lambda * penalty_value(x, spec);
}

SolverReport irl1_solve(const ProblemInstance& instance, const PenaltySpec& spec, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = instance.A.cols();
  SolverReport report;
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  Vector w = Vector::Ones(static_cast<Eigen::Index>(n));
  std::optional<InnerState> state;
  for (std::size_t k = 0; k < cfg.outer_max; ++k) {
    state = admm_weighted_l1(instance.A, instance.y, w, cfg.lambda, cfg.rho, cfg.inner_max, state);
    report.inner_iter_counts.push_back(state->iterations);
    const Vector next = state->x;
    report.result.objective_trace.push_back(objective(instance, spec, cfg.lambda, next));
    ++report.result.outer_iters;
    const bool done = outer_converged(next, x, cfg.outer_tol);
    x = next;
    w = irl1_weights(x, spec);
    if (done) {
      report.result.converged = true;
      break;
    }
  }
  report.result.estimate = std::move(x);
  report.final_weights_or_v = std::move(w);
  report.result.wall_time = seconds_since(start);
  return report;
}

SolverReport dca_solve(const ProblemInstance& instance, double p, double sigma, const SolverConfig& cfg) {
  cfg.validate();
  const PenaltySpec spec = PenaltySpec::gerf(p, sigma);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = instance.A.cols();
  SolverReport report;
  Vector x = Vector::Zero(static_cast<Eigen::Index>(n));
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  std::optional<InnerState> state;
  for (std::size_t k = 0; k < cfg.outer_max; ++k) {
    state = admm_l1_linear(instance.A, instance.y, cfg.lambda, -cfg.lambda * v, cfg.rho, cfg.inner_max, state);
    report.inner_iter_counts.push_back(state->iterations);
    const Vector next = state->theta;
    report.result.objective_trace.push_back(objective(instance, spec, cfg.lambda, next));
    ++report.result.outer_iters;
    const bool done = outer_converged(next, x, cfg.outer_tol);
    x = next;
    v = dc_gradient(x, p, sigma);
    if (done) {
      report.result.converged = true;
      break;
    }
  }
  report.result.estimate = std::move(x);
  report.final_weights_or_v = std::move(v);
  report.result.wall_time = seconds_since(start);
  return report;
}

SolverReport lasso_admm(const ProblemInstance& instance, const SolverConfig& cfg) {
  return irl1_solve(instance, PenaltySpec::l1(), cfg);
}

}  // namespace gerf
