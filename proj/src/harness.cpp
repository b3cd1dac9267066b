#include "gerf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "gerf/generators.hpp"
#include "gerf/penalty.hpp"
#include "gerf/rng.hpp"
#include "gerf/solvers.hpp"

namespace gerf::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, count) on up to thread_budget() workers.
template <class Fn>
void parallel_for(std::size_t count, Fn fn) {
  const std::size_t workers = std::min(thread_budget(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::vector<std::size_t> support_of(const Vector& x) {
  std::vector<std::size_t> s;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (x[j] != 0.0) s.push_back(static_cast<std::size_t>(j));
  return s;
}

double gerf_sum(const Vector& v, const std::vector<bool>& in_set, bool want, double p, double sigma) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (in_set[static_cast<std::size_t>(j)] == want) sum += phi(std::fabs(v[j]), p, sigma);
  return sum;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::PhaseTransition: return "phase";
    case ExperimentKind::MseStudy: return "mse";
    case ExperimentKind::Irl1VsDca: return "irl1-vs-dca";
    case ExperimentKind::MriDemo: return "mri";
    case ExperimentKind::GnspCheck: return "gnsp-check";
  }
  return "unknown";
}

MatrixSpec MatrixSpec::with_rows(std::size_t rows) const {
  MatrixSpec out = *this;
  out.m = rows;
  return out;
}

DenseMatrix MatrixSpec::generate(std::uint64_t seed) const {
  if (kind == Kind::Gaussian) return gen_gaussian_matrix(m, n, seed);
  return gen_oversampled_dct(m, n, F, seed);
}

std::string MatrixSpec::label() const {
  std::ostringstream out;
  if (kind == Kind::Gaussian)
    out << "gaussian(" << m << "," << n << ")";
  else
    out << "dct(" << m << "," << n << ",F=" << F << ")";
  return out.str();
}

void ExperimentSpec::validate() const {
  if (trials == 0) throw ContractError("experiment: trials must be at least 1");
  if (matrix.m == 0 || matrix.n == 0) throw ContractError("experiment: empty matrix shape");
  if (penalties.empty()) throw ContractError("experiment: no penalties given");
  auto increasing = [](const std::vector<std::size_t>& g) {
    return std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end();
  };
  if (!increasing(sparsity_grid)) throw ContractError("experiment: sparsity grid must be strictly increasing");
  if (!increasing(row_grid)) throw ContractError("experiment: row grid must be strictly increasing");
  for (std::size_t k : sparsity_grid)
    if (k > matrix.n) throw ContractError("experiment: sparsity " + std::to_string(k) + " exceeds n");
  if (!(noise_sd >= 0.0)) throw ContractError("experiment: noise_sd must be nonnegative");
  solver.validate();
}

double ExperimentSpec::lambda_for_rows(std::size_t m) const {
  if (lambda_rule == LambdaRule::NoiseScaled) return noise_sd * std::sqrt(static_cast<double>(m));
  return solver.lambda;
}

bool ExperimentRow::operator<(const ExperimentRow& other) const {
  // NaN parameters sort as equal to each other.
  auto key = [](double v) { return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v; };
  return std::make_tuple(method, key(param1), key(param2), k_or_m) <
         std::make_tuple(other.method, key(other.param1), key(other.param2), other.k_or_m);
}

ExperimentRow row_stub(const PenaltySpec& spec) {
  ExperimentRow row;
  row.param1 = kNaN;
  row.param2 = kNaN;
  if (const auto* g = std::get_if<penalties::Gerf>(&spec.kind)) {
    row.method = "gerf";
    row.param1 = g->p;
    row.param2 = g->sigma;
  } else if (std::holds_alternative<penalties::L1>(spec.kind)) {
    row.method = "lasso";
  } else if (const auto* l = std::get_if<penalties::Lp>(&spec.kind)) {
    row.method = "lp";
    row.param1 = l->p;
    row.param2 = l->eps;
  } else if (const auto* t = std::get_if<penalties::TL1>(&spec.kind)) {
    row.method = "tl1";
    row.param1 = t->a;
  }
  return row;
}

TrialSeeds trial_seeds(std::uint64_t base_seed, std::size_t trial, std::size_t grid_value) {
  Rng rng = Rng::stream(base_seed + trial, grid_value);
  TrialSeeds s{};
  s.matrix = rng.bits();
  s.signal = rng.bits();
  s.noise = rng.bits();
  return s;
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("GERF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RecoveryResult recover(const ProblemInstance& instance, const PenaltySpec& spec, const SolverConfig& cfg,
                       GerfAlgorithm algorithm) {
  if (spec.is_gerf() && algorithm == GerfAlgorithm::Dca) {
    const auto& g = spec.as_gerf();
    return dca_solve(instance, g.p, g.sigma, cfg).result;
  }
  return irl1_solve(instance, spec, cfg).result;
}

std::vector<ExperimentRow> run_phase_transition(const ExperimentSpec& spec, std::vector<std::string>* failures) {
  spec.validate();
  const std::size_t nk = spec.sparsity_grid.size(), np = spec.penalties.size();
  // hits[(ki * trials + t) * np + pi]
  std::vector<char> hits(nk * spec.trials * np, 0);
  std::mutex log_mutex;

  parallel_for(nk * spec.trials, [&](std::size_t task) {
    const std::size_t ki = task / spec.trials, t = task % spec.trials;
    const std::size_t k = spec.sparsity_grid[ki];
    const TrialSeeds seeds = trial_seeds(spec.base_seed, t, k);
    const DenseMatrix A = spec.matrix.generate(seeds.matrix);
    const Vector x = gen_sparse_signal(spec.matrix.n, k, seeds.signal);
    Vector y = A.values() * x;
    if (spec.noise_sd > 0.0) {
      Rng noise(seeds.noise);
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += spec.noise_sd * noise.normal();
    }
    const auto instance = ProblemInstance::make(A, y, x);
    for (std::size_t pi = 0; pi < np; ++pi) {
      try {
        const RecoveryResult r = recover(instance, spec.penalties[pi], spec.solver, spec.gerf_algorithm);
        // k = 0 has a zero truth, so judge the estimate norm instead.
        const bool ok = k == 0 ? r.estimate.norm() <= spec.success_tol
                               : relative_error(r.estimate, x) <= spec.success_tol;
        hits[task * np + pi] = ok ? 1 : 0;
      } catch (const std::exception& e) {
        if (failures) {
          std::lock_guard lock(log_mutex);
          failures->push_back(spec.penalties[pi].label() + " k=" + std::to_string(k) + " trial=" +
                              std::to_string(t) + ": " + e.what());
        }
      }
    }
  });

  std::vector<ExperimentRow> rows;
  for (std::size_t pi = 0; pi < np; ++pi)
    for (std::size_t ki = 0; ki < nk; ++ki) {
      std::size_t count = 0;
      for (std::size_t t = 0; t < spec.trials; ++t) count += hits[(ki * spec.trials + t) * np + pi];
      ExperimentRow row = row_stub(spec.penalties[pi]);
      row.k_or_m = spec.sparsity_grid[ki];
      row.value = static_cast<double>(count) / static_cast<double>(spec.trials);
      row.n_trials = spec.trials;
      row.seed = spec.base_seed;
      rows.push_back(row);
    }
  std::sort(rows.begin(), rows.end());
  if (failures) std::sort(failures->begin(), failures->end());
  return rows;
}

double oracle_mse(const DenseMatrix& A, const std::vector<std::size_t>& support, double noise_sd) {
  if (support.empty()) throw ContractError("oracle_mse: empty support");
  if (!(noise_sd >= 0.0)) throw ContractError("oracle_mse: noise_sd must be nonnegative");
  const auto s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd AS(static_cast<Eigen::Index>(A.rows()), s);
  for (Eigen::Index j = 0; j < s; ++j) {
    if (support[j] >= A.cols()) throw ContractError("oracle_mse: support index out of range");
    AS.col(j) = A.values().col(static_cast<Eigen::Index>(support[j]));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(AS);
  if (qr.rank() < s) throw NumericalError("oracle_mse: A_S is rank deficient");
  const Eigen::MatrixXd gram = AS.transpose() * AS;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericalError("oracle_mse: A_S^T A_S is singular");
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(s, s));
  return noise_sd * noise_sd * inv.trace();
}

std::vector<ExperimentRow> run_mse_study(const ExperimentSpec& spec, std::vector<std::string>* failures) {
  spec.validate();
  if (spec.sparsity_grid.size() != 1) throw ContractError("mse study: give exactly one sparsity level");
  if (spec.row_grid.empty()) throw ContractError("mse study: empty row grid");
  if (spec.lambda_rule == LambdaRule::NoiseScaled && !(spec.noise_sd > 0.0))
    throw ContractError("mse study: the noise-scaled lambda rule needs noise_sd > 0");
  const std::size_t k = spec.sparsity_grid.front();
  const std::size_t nm = spec.row_grid.size(), np = spec.penalties.size();
  const double nan = kNaN;
  // err[(mi * trials + t) * (np + 1) + pi]; the last slot holds the oracle value.
  std::vector<double> err(nm * spec.trials * (np + 1), nan);
  std::mutex log_mutex;

  parallel_for(nm * spec.trials, [&](std::size_t task) {
    const std::size_t mi = task / spec.trials, t = task % spec.trials;
    const std::size_t m = spec.row_grid[mi];
    const TrialSeeds seeds = trial_seeds(spec.base_seed, t, m);
    const DenseMatrix A = spec.matrix.with_rows(m).generate(seeds.matrix);
    const Vector x = gen_sparse_signal(spec.matrix.n, k, seeds.signal);
    Vector y = A.values() * x;
    Rng noise(seeds.noise);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += spec.noise_sd * noise.normal();
    const auto instance = ProblemInstance::make(A, y, x, spec.noise_sd);
    double* slot = &err[task * (np + 1)];
    SolverConfig cfg = spec.solver;
    cfg.lambda = spec.lambda_for_rows(m);
    for (std::size_t pi = 0; pi < np; ++pi) {
      try {
        const RecoveryResult r = recover(instance, spec.penalties[pi], cfg, spec.gerf_algorithm);
        slot[pi] = (r.estimate - x).squaredNorm();
      } catch (const std::exception& e) {
        std::lock_guard lock(log_mutex);
        if (failures)
          failures->push_back(spec.penalties[pi].label() + " m=" + std::to_string(m) + " trial=" +
                              std::to_string(t) + ": " + e.what());
      }
    }
    slot[np] = oracle_mse(A, support_of(x), spec.noise_sd);
  });

  std::vector<ExperimentRow> rows;
  for (std::size_t pi = 0; pi <= np; ++pi)
    for (std::size_t mi = 0; mi < nm; ++mi) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const double v = err[(mi * spec.trials + t) * (np + 1) + pi];
        if (!std::isnan(v)) {
          sum += v;
          ++count;
        }
      }
      ExperimentRow row;
      if (pi < np) {
        row = row_stub(spec.penalties[pi]);
      } else {
        row.method = "oracle";
        row.param1 = row.param2 = nan;
      }
      row.k_or_m = spec.row_grid[mi];
      row.value = count ? sum / static_cast<double>(count) : nan;
      row.n_trials = count;
      row.seed = spec.base_seed;
      rows.push_back(row);
    }
  std::sort(rows.begin(), rows.end());
  if (failures) std::sort(failures->begin(), failures->end());
  return rows;
}

Irl1VsDcaResult compare_irl1_dca(const ProblemInstance& instance, double p, double sigma, const SolverConfig& cfg,
                                 std::size_t repetitions) {
  if (repetitions == 0) throw ContractError("compare_irl1_dca: repetitions must be positive");
  const PenaltySpec spec = PenaltySpec::gerf(p, sigma);
  Irl1VsDcaResult out;
  // Alternate the two so that cache warmth and frequency drift hit both alike.
  for (std::size_t r = 0; r < repetitions; ++r) {
    out.irl1 = irl1_solve(instance, spec, cfg).result;
    out.dca = dca_solve(instance, p, sigma, cfg).result;
    out.irl1_mean_time += out.irl1.wall_time;
    out.dca_mean_time += out.dca.wall_time;
  }
  out.irl1_mean_time /= static_cast<double>(repetitions);
  out.dca_mean_time /= static_cast<double>(repetitions);
  if (instance.truth) {
    out.irl1_error = relative_error(out.irl1.estimate, *instance.truth);
    out.dca_error = relative_error(out.dca.estimate, *instance.truth);
  } else {
    out.irl1_error = out.dca_error = kNaN;
  }
  const double scale = out.dca.estimate.norm();
  out.agreement = (out.irl1.estimate - out.dca.estimate).norm() / (scale > 0.0 ? scale : 1.0);
  return out;
}

std::vector<ExperimentRow> irl1_vs_dca_rows(const Irl1VsDcaResult& r, double p, double sigma, std::size_t k,
                                            std::uint64_t seed) {
  auto make = [&](const char* method, double value) {
    return ExperimentRow{method, p, sigma, k, value, 1, seed};
  };
  std::vector<ExperimentRow> rows = {
      make("irl1:rel_error", r.irl1_error),   make("dca:rel_error", r.dca_error),
      make("irl1:mean_time", r.irl1_mean_time), make("dca:mean_time", r.dca_mean_time),
      make("irl1:outer_iters", static_cast<double>(r.irl1.outer_iters)),
      make("dca:outer_iters", static_cast<double>(r.dca.outer_iters)),
      make("agreement", r.agreement),
  };
  std::sort(rows.begin(), rows.end());
  return rows;
}

Eigen::MatrixXd kernel_basis(const DenseMatrix& A) {
  const Eigen::MatrixXd M = A.values();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv[0] : 0.0;
  const double tol = top * static_cast<double>(std::max(M.rows(), M.cols())) * std::numeric_limits<double>::epsilon();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;
  return svd.matrixV().rightCols(M.cols() - rank);
}

bool violates_gnsp(const Vector& v, const std::vector<std::size_t>& support, double p, double sigma) {
  std::vector<bool> in_set(static_cast<std::size_t>(v.size()), false);
  for (std::size_t j : support) {
    if (j >= in_set.size()) throw ContractError("violates_gnsp: support index out of range");
    in_set[j] = true;
  }
  return gerf_sum(v, in_set, true, p, sigma) >= gerf_sum(v, in_set, false, p, sigma);
}

GnspReport check_gnsp_sampled(const DenseMatrix& A, std::size_t s, double p, double sigma, std::size_t n_samples,
                              std::uint64_t seed) {
  const std::size_t n = A.cols();
  if (n > 16) throw ContractError("gnsp-check: N must be at most 16");
  if (s == 0 || 2 * s > n) throw ContractError("gnsp-check: need 1 <= s <= N/2");
  if (!(p > 0.0) || !(sigma > 0.0)) throw DomainError("gnsp-check: p and sigma must be positive");
  const Eigen::MatrixXd K = kernel_basis(A);
  if (K.cols() == 0) throw DomainError("gnsp-check: A has a trivial kernel");

  GnspReport report;
  report.kernel_dim = static_cast<std::size_t>(K.cols());
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Vector g(K.cols());
    for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = rng.normal();
    Vector v = K * g;
    const double norm = v.norm();
    if (norm == 0.0) continue;
    v /= norm;
    ++report.samples_checked;
    // Phi is increasing, so among supports of size t the t largest entries
    // maximize J(v_S) - J(v_{S^c}); checking them covers every support.
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&v](std::size_t a, std::size_t b) { return std::fabs(v[a]) > std::fabs(v[b]); });
    for (std::size_t t = 1; t <= s; ++t) {
      std::vector<std::size_t> support(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t));
      if (violates_gnsp(v, support, p, sigma)) {
        std::sort(support.begin(), support.end());
        report.counterexample = GnspCounterexample{v, std::move(support)};
        return report;
      }
    }
  }
  return report;
}

MriDemoResult run_mri_demo(std::size_t n, std::size_t lines, const std::vector<std::string>& methods,
                           const imaging::ReconParams& params) {
  using namespace imaging;
  MriDemoResult out;
  out.truth = shepp_logan(n);
  out.mask = radial_mask(n, lines);
  const ImagingProblem prob = ImagingProblem::from_image(out.truth, out.mask);
  std::vector<std::string> todo = methods;
  if (todo.empty()) todo = {"zero_fill", "tv", "l1l2", "gerf:p=1,sigma=1"};
  for (const std::string& method : todo) {
    ExperimentRow row{method, kNaN, kNaN, lines, 0.0, 1, 0};
    if (method == "zero_fill") {
      out.images[method] = zero_fill_recon(prob);
    } else {
      ReconReport rep;
      if (method == "tv") {
        rep = tv_recon(prob, params);
      } else if (method == "l1l2") {
        rep = l1l2_grad_recon(prob, params);
      } else {
        const PenaltySpec spec = PenaltySpec::parse(method);
        const auto& g = spec.as_gerf();
        rep = gerf_grad_recon(prob, g.p, g.sigma, params);
        row.method = "gerf";
        row.param1 = g.p;
        row.param2 = g.sigma;
      }
      out.images[method] = rep.image;
      out.reports[method] = std::move(rep);
    }
    row.value = relative_error(out.images[method], out.truth);
    out.rows.push_back(row);
  }
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "method,param1,param2,k_or_m,value,n_trials,seed\n";
  for (const auto& r : rows)
    out << r.method << ',' << format_double(r.param1) << ',' << format_double(r.param2) << ',' << r.k_or_m << ','
        << format_double(r.value) << ',' << r.n_trials << ',' << r.seed << '\n';
}

void write_csv(const std::string& path, const std::vector<ExperimentRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot open '" + path + "' for writing");
  write_csv(out, rows);
}

Metadata metadata_for(const ExperimentSpec& spec) {
  Metadata meta;
  auto join = [](const std::vector<std::size_t>& g) {
    std::string s;
    for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + std::to_string(g[i]);
    return s;
  };
  meta["artifact_version"] = kArtifactVersion;
  meta["kind"] = to_string(spec.kind);
  meta["matrix"] = spec.matrix.label();
  meta["sparsity_grid"] = join(spec.sparsity_grid);
  if (!spec.row_grid.empty()) meta["row_grid"] = join(spec.row_grid);
  meta["trials"] = std::to_string(spec.trials);
  meta["base_seed"] = std::to_string(spec.base_seed);
  meta["noise_sd"] = format_double(spec.noise_sd);
  if (spec.lambda_rule == LambdaRule::NoiseScaled) {
    meta["lambda_rule"] = "noise_sd*sqrt(m)";
    for (std::size_t m : spec.row_grid) meta["lambda_m" + std::to_string(m)] = format_double(spec.lambda_for_rows(m));
  } else {
    meta["lambda_rule"] = "fixed";
    meta["lambda"] = format_double(spec.solver.lambda);
  }
  meta["rho"] = format_double(spec.solver.rho);
  meta["outer_max"] = std::to_string(spec.solver.outer_max);
  meta["inner_max"] = std::to_string(spec.solver.inner_max);
  meta["outer_tol"] = format_double(spec.solver.outer_tol);
  meta["success_tol"] = format_double(spec.success_tol);
  meta["gerf_algorithm"] = spec.gerf_algorithm == GerfAlgorithm::Dca ? "dca" : "irl1";
  std::string labels;
  for (std::size_t i = 0; i < spec.penalties.size(); ++i) labels += (i ? ";" : "") + spec.penalties[i].label();
  meta["penalties"] = labels;
  meta["omitted_baselines"] = "l1-l2 (vector form; solver unspecified)";
  return meta;
}

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [key, value] : meta) out << key << '=' << value << '\n';
}

void write_metadata(const std::string& path, const Metadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot open '" + path + "' for writing");
  write_metadata(out, meta);
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  auto number = [&text](const std::string& item) -> std::size_t {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || v < 0) throw ContractError("bad grid '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ContractError("bad grid '" + text + "': expected start:step:stop");
    const std::size_t start = number(parts[0]), step = number(parts[1]), stop = number(parts[2]);
    if (step == 0) throw ContractError("bad grid '" + text + "': zero step");
    for (std::size_t v = start; v <= stop; v += step) grid.push_back(v);
  } else {
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) grid.push_back(number(item));
  }
  if (grid.empty()) throw ContractError("bad grid '" + text + "': empty");
  if (std::adjacent_find(grid.begin(), grid.end(), std::greater_equal<>()) != grid.end())
    throw ContractError("bad grid '" + text + "': not strictly increasing");
  return grid;
}

}  // namespace gerf::harness
