#include "gerf/core.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace gerf {

namespace {

void require_finite(const RowMatrix& m) {
  if (!m.allFinite()) throw ContractError("DenseMatrix: non-finite entry");
}

std::string fmt_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries) {
  if (entries.size() != rows * cols) {
    throw ContractError("DenseMatrix: entries length " + std::to_string(entries.size()) +
                        " != rows*cols " + std::to_string(rows * cols));
  }
  values_ = Eigen::Map<const RowMatrix>(entries.data(), static_cast<Eigen::Index>(rows),
                                        static_cast<Eigen::Index>(cols));
  require_finite(values_);
}

DenseMatrix::DenseMatrix(RowMatrix values) : values_(std::move(values)) { require_finite(values_); }

ProblemInstance ProblemInstance::make(DenseMatrix A, Vector y, std::optional<Vector> truth,
                                      std::optional<double> noise_sd) {
  if (static_cast<std::size_t>(y.size()) != A.rows()) {
    throw ContractError("ProblemInstance: y has length " + std::to_string(y.size()) +
                        " but A has " + std::to_string(A.rows()) + " rows");
  }
  if (truth && static_cast<std::size_t>(truth->size()) != A.cols()) {
    throw ContractError("ProblemInstance: truth has length " + std::to_string(truth->size()) +
                        " but A has " + std::to_string(A.cols()) + " columns");
  }
  if (noise_sd && !(*noise_sd >= 0.0)) throw ContractError("ProblemInstance: negative noise_sd");
  return ProblemInstance{std::move(A), std::move(y), std::move(truth), noise_sd};
}

PenaltySpec PenaltySpec::gerf(double p, double sigma) {
  if (!(p > 0.0) || !(sigma > 0.0)) throw DomainError("GERF penalty requires p > 0 and sigma > 0");
  return PenaltySpec{penalties::Gerf{p, sigma}};
}

PenaltySpec PenaltySpec::l1() { return PenaltySpec{penalties::L1{}}; }

PenaltySpec PenaltySpec::lp(double p, double eps) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("Lp penalty requires p in (0, 1)");
  if (!(eps > 0.0)) throw DomainError("Lp penalty requires eps > 0");
  return PenaltySpec{penalties::Lp{p, eps}};
}

PenaltySpec PenaltySpec::tl1(double a) {
  if (!(a > 0.0)) throw DomainError("TL1 penalty requires a > 0");
  return PenaltySpec{penalties::TL1{a}};
}

const penalties::Gerf& PenaltySpec::as_gerf() const {
  if (const auto* g = std::get_if<penalties::Gerf>(&kind)) return *g;
  throw ContractError("penalty " + label() + " is not a GERF penalty");
}

std::string PenaltySpec::label() const {
  struct Visitor {
    std::string operator()(const penalties::Gerf& g) const {
      return "gerf:p=" + fmt_number(g.p) + ",sigma=" + fmt_number(g.sigma);
    }
    std::string operator()(const penalties::L1&) const { return "lasso"; }
    std::string operator()(const penalties::Lp& l) const { return "lp:p=" + fmt_number(l.p); }
    std::string operator()(const penalties::TL1& t) const { return "tl1:a=" + fmt_number(t.a); }
  };
  return std::visit(Visitor{}, kind);
}

PenaltySpec PenaltySpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::map<std::string, double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ContractError("bad penalty argument '" + item + "'");
      try {
        args[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw ContractError("bad penalty value in '" + item + "'");
      }
    }
  }
  auto get = [&](const char* key) {
    auto it = args.find(key);
    if (it == args.end()) throw ContractError("penalty '" + text + "' is missing " + key);
    return it->second;
  };
  if (name == "gerf") return gerf(get("p"), get("sigma"));
  if (name == "lasso" || name == "l1") return l1();
  if (name == "lp") return args.count("eps") ? lp(get("p"), get("eps")) : lp(get("p"));
  if (name == "tl1") return tl1(args.count("a") ? get("a") : 1.0);
  throw ContractError("unknown penalty '" + text + "'");
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0)) throw ContractError("SolverConfig: lambda must be positive");
  if (!(rho > 0.0)) throw ContractError("SolverConfig: rho must be positive");
  if (outer_max == 0 || inner_max == 0) throw ContractError("SolverConfig: iteration caps must be positive");
  if (!(outer_tol > 0.0)) throw ContractError("SolverConfig: outer_tol must be positive");
}

CholeskySolver::CholeskySolver(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols()) throw ContractError("CholeskySolver: matrix is not square");
  if (!G.isApprox(G.transpose(), 1e-12)) throw FactorizationError("CholeskySolver: matrix is not symmetric");
  llt_.compute(G);
  if (llt_.info() != Eigen::Success) throw FactorizationError("CholeskySolver: matrix is not positive definite");
}

Vector CholeskySolver::solve(const Vector& b) const {
  if (b.size() != llt_.rows()) throw ContractError("CholeskySolver: right-hand side has wrong length");
  return llt_.solve(b);
}

namespace {

struct CacheEntry {
  Eigen::MatrixXd G;
  std::shared_ptr<const CholeskySolver> solver;
};

class SolverCache {
 public:
  std::shared_ptr<const CholeskySolver> get(const Eigen::MatrixXd& G) {
    const auto key = hash(G);
    {
      std::lock_guard lock(mutex_);
      auto [lo, hi] = entries_.equal_range(key);
      for (auto it = lo; it != hi; ++it) {
        if (it->second.G.rows() == G.rows() && it->second.G.cols() == G.cols() && it->second.G == G)
          return it->second.solver;
      }
    }
    auto solver = std::make_shared<const CholeskySolver>(G);
    std::lock_guard lock(mutex_);
    if (entries_.size() >= kCapacity) entries_.clear();
    entries_.emplace(key, CacheEntry{G, solver});
    return solver;
  }

 private:
  static constexpr std::size_t kCapacity = 16;

  static std::uint64_t hash(const Eigen::MatrixXd& G) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ULL;
    };
    mix(static_cast<std::uint64_t>(G.rows()));
    mix(static_cast<std::uint64_t>(G.cols()));
    for (Eigen::Index i = 0; i < G.size(); ++i) {
      std::uint64_t bits;
      const double v = G.data()[i];
      std::memcpy(&bits, &v, sizeof bits);
      mix(bits);
    }
    return h;
  }

  std::mutex mutex_;
  std::multimap<std::uint64_t, CacheEntry> entries_;
};

}  // namespace

Vector cholesky_cached_solve(const Eigen::MatrixXd& G, const Vector& b) {
  static SolverCache cache;
  return cache.get(G)->solve(b);
}

double relative_error(const Vector& x_hat, const Vector& x) {
  if (x_hat.size() != x.size()) throw ContractError("relative_error: length mismatch");
  const double denom = x.norm();
  if (denom == 0.0) throw DomainError("relative_error: zero ground truth");
  return (x_hat - x).norm() / denom;
}

double relative_error(const RowMatrix& x_hat, const RowMatrix& x) {
  if (x_hat.rows() != x.rows() || x_hat.cols() != x.cols())
    throw ContractError("relative_error: shape mismatch");
  const double denom = x.norm();
  if (denom == 0.0) throw DomainError("relative_error: zero ground truth");
  return (x_hat - x).norm() / denom;
}

}  // namespace gerf
