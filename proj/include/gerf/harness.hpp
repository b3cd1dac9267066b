#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gerf/core.hpp"
#include "gerf/imaging.hpp"

namespace gerf::harness {

enum class ExperimentKind { PhaseTransition, MseStudy, Irl1VsDca, MriDemo, GnspCheck };

std::string to_string(ExperimentKind kind);

struct MatrixSpec {
  enum class Kind { Gaussian, OversampledDct };
  Kind kind = Kind::Gaussian;
  std::size_t m = 64;
  std::size_t n = 256;
  double F = 5.0;  ///< oversampling factor, DCT only

  static MatrixSpec gaussian(std::size_t m, std::size_t n) { return {Kind::Gaussian, m, n, 5.0}; }
  static MatrixSpec dct(std::size_t m, std::size_t n, double F) { return {Kind::OversampledDct, m, n, F}; }
  MatrixSpec with_rows(std::size_t rows) const;
  DenseMatrix generate(std::uint64_t seed) const;
  std::string label() const;
};

/// Which outer algorithm runs GERF penalties. Other penalties always use IRL1.
enum class GerfAlgorithm { Dca, Irl1 };

/// Fixed uses solver.lambda everywhere; NoiseScaled sets lambda = noise_sd * sqrt(m)
/// for each row count of the MSE study.
enum class LambdaRule { Fixed, NoiseScaled };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::PhaseTransition;
  MatrixSpec matrix;
  std::vector<std::size_t> sparsity_grid;  ///< k values; a single k for the MSE study
  std::vector<std::size_t> row_grid;       ///< m values for the MSE study
  std::size_t trials = 20;
  SolverConfig solver;
  std::vector<PenaltySpec> penalties;
  std::uint64_t base_seed = 0;
  double noise_sd = 0.0;
  double success_tol = 1e-3;
  GerfAlgorithm gerf_algorithm = GerfAlgorithm::Dca;
  LambdaRule lambda_rule = LambdaRule::Fixed;

  double lambda_for_rows(std::size_t m) const;
  void validate() const;
};

/// One CSV line. param1/param2 are NaN when the method has no parameters.
struct ExperimentRow {
  std::string method;
  double param1 = 0.0;
  double param2 = 0.0;
  std::size_t k_or_m = 0;
  double value = 0.0;
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;

  bool operator<(const ExperimentRow& other) const;
};

/// Method label and its (param1, param2) for a penalty.
ExperimentRow row_stub(const PenaltySpec& spec);

/// Seeds of the matrix and signal used by trial t at grid point g.
struct TrialSeeds {
  std::uint64_t matrix;
  std::uint64_t signal;
  std::uint64_t noise;
};
TrialSeeds trial_seeds(std::uint64_t base_seed, std::size_t trial, std::size_t grid_value);

/// Worker count from GERF_THREADS, else the number of logical cores.
std::size_t thread_budget();

/// Runs one penalty on one instance with the algorithm the experiment selects.
RecoveryResult recover(const ProblemInstance& instance, const PenaltySpec& spec, const SolverConfig& cfg,
                       GerfAlgorithm algorithm = GerfAlgorithm::Dca);

/// Success rate of each penalty at each k. Solver failures count as misses and
/// are collected in `failures`.
std::vector<ExperimentRow> run_phase_transition(const ExperimentSpec& spec,
                                                std::vector<std::string>* failures = nullptr);

/// sd^2 * trace((A_S^T A_S)^{-1})
double oracle_mse(const DenseMatrix& A, const std::vector<std::size_t>& support, double noise_sd);

/// Mean squared error per (method, m), plus an "oracle" row per m.
std::vector<ExperimentRow> run_mse_study(const ExperimentSpec& spec, std::vector<std::string>* failures = nullptr);

struct Irl1VsDcaResult {
  RecoveryResult irl1;
  RecoveryResult dca;
  double irl1_error = 0.0;
  double dca_error = 0.0;
  double agreement = 0.0;  ///< ||x_irl1 - x_dca|| / ||x_dca||
  double irl1_mean_time = 0.0;
  double dca_mean_time = 0.0;
};

/// Both GERF algorithms on one instance; timings are means over `repetitions` runs.
Irl1VsDcaResult compare_irl1_dca(const ProblemInstance& instance, double p, double sigma, const SolverConfig& cfg,
                                 std::size_t repetitions);
std::vector<ExperimentRow> irl1_vs_dca_rows(const Irl1VsDcaResult& r, double p, double sigma, std::size_t k,
                                            std::uint64_t seed);

struct GnspCounterexample {
  Vector v;
  std::vector<std::size_t> support;
};

struct GnspReport {
  std::optional<GnspCounterexample> counterexample;
  std::size_t samples_checked = 0;
  std::size_t kernel_dim = 0;
};

/// Samples unit vectors of Ker(A) and returns the first (v, S), |S| <= s, with
/// J(v_S) >= J(v_{S^c}). Finding none proves nothing.
GnspReport check_gnsp_sampled(const DenseMatrix& A, std::size_t s, double p, double sigma, std::size_t n_samples,
                              std::uint64_t seed);

/// Direct re-evaluation of J(v_S) >= J(v_{S^c}).
bool violates_gnsp(const Vector& v, const std::vector<std::size_t>& support, double p, double sigma);

/// Orthonormal basis of Ker(A) from the SVD.
Eigen::MatrixXd kernel_basis(const DenseMatrix& A);

struct MriDemoResult {
  Image truth;
  imaging::Mask mask;
  /// Reconstructions keyed by method label ("zero_fill", "tv", "l1l2", "gerf:p=..,sigma=..").
  std::map<std::string, Image> images;
  std::map<std::string, imaging::ReconReport> reports;
  std::vector<ExperimentRow> rows;  ///< relative error per method, k_or_m = line count
};

/// Phantom reconstruction from radial k-space lines. `methods` holds "tv",
/// "l1l2", "zero_fill" or a GERF label; empty means all four with GERF(1, 1).
MriDemoResult run_mri_demo(std::size_t n, std::size_t lines, const std::vector<std::string>& methods,
                           const imaging::ReconParams& params);

// CSV with header method,param1,param2,k_or_m,value,n_trials,seed.
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);
void write_csv(const std::string& path, const std::vector<ExperimentRow>& rows);

using Metadata = std::map<std::string, std::string>;
Metadata metadata_for(const ExperimentSpec& spec);
void write_metadata(std::ostream& out, const Metadata& meta);
void write_metadata(const std::string& path, const Metadata& meta);

/// %.17g, so values round-trip exactly.
std::string format_double(double v);

/// Parses "a:step:b" or "a,b,c" into a strictly increasing list.
std::vector<std::size_t> parse_grid(const std::string& text);

inline constexpr const char* kArtifactVersion = "0.1.0";

}  // namespace gerf::harness
