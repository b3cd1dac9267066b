#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gerf/core.hpp"
#include "gerf/generators.hpp"
#include "gerf/harness.hpp"
#include "gerf/imaging.hpp"
#include "gerf/matrix_io.hpp"
#include "gerf/rng.hpp"
#include "gerf/solvers.hpp"

namespace {

using namespace gerf;
namespace h = gerf::harness;

// Bad input from the user: usage-style failure.
constexpr int kUsageExit = 2;

struct SolverFlags {
  double lambda = std::nan("");
  double rho = std::nan("");
  std::size_t outer = 10;
  std::size_t inner = 512;
  double tol = 1e-6;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "regularization weight (default 1e-5 noise-free, 1e-2 noisy)");
    cmd->add_option("--rho", rho, "ADMM penalty (default 100 * lambda)");
    cmd->add_option("--outer", outer, "outer iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--inner", inner, "ADMM iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", tol, "outer relative-change tolerance")->check(CLI::PositiveNumber);
  }

  SolverConfig config(bool noisy) const {
    SolverConfig cfg;
    cfg.lambda = std::isnan(lambda) ? (noisy ? 1e-2 : 1e-5) : lambda;
    cfg.rho = std::isnan(rho) ? 100.0 * cfg.lambda : rho;
    cfg.outer_max = outer;
    cfg.inner_max = inner;
    cfg.outer_tol = tol;
    cfg.validate();
    return cfg;
  }
};

struct MatrixFlags {
  std::string kind = "gaussian";
  std::size_t m = 64;
  std::size_t n = 256;
  double F = 5.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--matrix", kind, "gaussian or dct")->check(CLI::IsMember({"gaussian", "dct"}));
    cmd->add_option("--m", m, "rows")->check(CLI::PositiveNumber);
    cmd->add_option("--n", n, "columns")->check(CLI::PositiveNumber);
    cmd->add_option("--F", F, "DCT oversampling factor")->check(CLI::PositiveNumber);
  }

  h::MatrixSpec spec() const {
    return kind == "dct" ? h::MatrixSpec::dct(m, n, F) : h::MatrixSpec::gaussian(m, n);
  }
};

std::vector<PenaltySpec> parse_penalties(const std::vector<std::string>& labels) {
  std::vector<PenaltySpec> out;
  for (const auto& l : labels) out.push_back(PenaltySpec::parse(l));
  return out;
}

// Writes rows to path (or stdout) and the sidecar next to it.
void emit(const std::string& path, const std::vector<h::ExperimentRow>& rows, const h::Metadata& meta) {
  if (path.empty() || path == "-") {
    h::write_csv(std::cout, rows);
    return;
  }
  h::write_csv(path, rows);
  h::write_metadata(path + ".meta", meta);
}

void report_failures(const std::vector<std::string>& failures) {
  for (const auto& f : failures) std::cerr << "solver failure: " << f << '\n';
}

h::GerfAlgorithm parse_algorithm(const std::string& name) {
  return name == "irl1" ? h::GerfAlgorithm::Irl1 : h::GerfAlgorithm::Dca;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GERF sparse recovery experiments"};
  app.require_subcommand(1);

  // recover
  auto* recover = app.add_subcommand("recover", "solve one instance stored as GERFMAT1 files");
  std::string a_path, y_path, truth_path, out_path, penalty_label = "gerf:p=2,sigma=1", algorithm = "dca";
  bool noisy = false;
  SolverFlags recover_solver;
  recover->add_option("--A", a_path, "measurement matrix")->required();
  recover->add_option("--y", y_path, "measurements")->required();
  recover->add_option("--truth", truth_path, "ground truth, for the error report");
  recover->add_option("--out", out_path, "estimate output file");
  recover->add_option("--penalty", penalty_label, "gerf:p=..,sigma=.. | lasso | lp:p=.. | tl1:a=..");
  recover->add_option("--algorithm", algorithm, "dca or irl1 (GERF only)")->check(CLI::IsMember({"dca", "irl1"}));
  recover->add_flag("--noisy", noisy, "use the noisy-data lambda default");
  recover_solver.attach(recover);

  // phase
  auto* phase = app.add_subcommand("phase", "success rate against sparsity");
  MatrixFlags phase_matrix;
  std::vector<std::string> phase_penalties;
  std::string phase_k = "2:4:30", phase_out, phase_algorithm = "dca";
  std::size_t phase_trials = 50;
  std::uint64_t phase_seed = 0;
  double phase_tol = 1e-3;
  SolverFlags phase_solver;
  phase_matrix.attach(phase);
  phase->add_option("--penalty", phase_penalties, "penalty label, repeatable")->required();
  phase->add_option("--k", phase_k, "sparsity grid start:step:stop or a,b,c");
  phase->add_option("--trials", phase_trials, "trials per point")->check(CLI::PositiveNumber);
  phase->add_option("--seed", phase_seed, "base seed");
  phase->add_option("--success-tol", phase_tol, "relative error counted as success");
  phase->add_option("--algorithm", phase_algorithm, "dca or irl1 for GERF")->check(CLI::IsMember({"dca", "irl1"}));
  phase->add_option("--out", phase_out, "CSV path (stdout if omitted)");
  phase_solver.attach(phase);

  // mse
  auto* mse = app.add_subcommand("mse", "mean squared error against measurement count");
  std::vector<std::string> mse_penalties;
  std::string mse_m = "280,340,400", mse_out, mse_lambda_rule = "noise";
  std::size_t mse_n = 512, mse_k = 130, mse_trials = 20;
  double mse_noise = 0.1;
  std::uint64_t mse_seed = 0;
  SolverFlags mse_solver;
  mse->add_option("--penalty", mse_penalties, "penalty label, repeatable")->required();
  mse->add_option("--m", mse_m, "row grid");
  mse->add_option("--n", mse_n, "signal length")->check(CLI::PositiveNumber);
  mse->add_option("--k", mse_k, "sparsity");
  mse->add_option("--noise", mse_noise, "noise standard deviation")->check(CLI::PositiveNumber);
  mse->add_option("--trials", mse_trials, "trials per m")->check(CLI::PositiveNumber);
  mse->add_option("--seed", mse_seed, "base seed");
  mse->add_option("--lambda-rule", mse_lambda_rule, "noise: lambda = noise*sqrt(m); fixed: --lambda")
      ->check(CLI::IsMember({"noise", "fixed"}));
  mse->add_option("--out", mse_out, "CSV path (stdout if omitted)");
  mse_solver.attach(mse);

  // irl1-vs-dca
  auto* cmp = app.add_subcommand("irl1-vs-dca", "compare the two GERF algorithms on one instance");
  MatrixFlags cmp_matrix;
  std::size_t cmp_k = 30, cmp_reps = 10;
  double cmp_p = 2.0, cmp_sigma = 1.0, cmp_noise = 0.0;
  std::uint64_t cmp_seed = 0;
  std::string cmp_out;
  SolverFlags cmp_solver;
  cmp_matrix.attach(cmp);
  cmp->add_option("--k", cmp_k, "sparsity");
  cmp->add_option("--p", cmp_p, "GERF shape")->check(CLI::PositiveNumber);
  cmp->add_option("--sigma", cmp_sigma, "GERF scale")->check(CLI::PositiveNumber);
  cmp->add_option("--noise", cmp_noise, "noise standard deviation")->check(CLI::NonNegativeNumber);
  cmp->add_option("--reps", cmp_reps, "timing repetitions")->check(CLI::PositiveNumber);
  cmp->add_option("--seed", cmp_seed, "instance seed");
  cmp->add_option("--out", cmp_out, "CSV path (stdout if omitted)");
  cmp_solver.attach(cmp);

  // mri
  auto* mri = app.add_subcommand("mri", "phantom reconstruction from radial k-space lines");
  std::size_t mri_n = 256, mri_lines = 7;
  std::vector<std::string> mri_methods;
  std::string mri_dir = ".", mri_out;
  imaging::ReconParams mri_params;
  mri->add_option("--n", mri_n, "image side")->check(CLI::Range(16, 4096));
  mri->add_option("--lines", mri_lines, "radial line count")->check(CLI::PositiveNumber);
  mri->add_option("--method", mri_methods, "zero_fill, tv, l1l2 or a gerf label; repeatable (default: all)");
  mri->add_option("--out-dir", mri_dir, "directory for PGM images");
  mri->add_option("--out", mri_out, "CSV path (stdout if omitted)");
  mri->add_option("--gradient-weight", mri_params.gradient_weight)->check(CLI::PositiveNumber);
  mri->add_option("--constraint-weight", mri_params.constraint_weight)->check(CLI::PositiveNumber);
  mri->add_option("--inner", mri_params.inner_max, "split Bregman sweeps per DCA step")->check(CLI::PositiveNumber);
  mri->add_option("--outer", mri_params.outer_max, "DCA steps")->check(CLI::PositiveNumber);
  mri->add_option("--tol", mri_params.outer_tol)->check(CLI::PositiveNumber);

  // gnsp-check
  auto* gnsp = app.add_subcommand("gnsp-check", "search Ker(A) for a null space property violation");
  std::string gnsp_A;
  std::size_t gnsp_m = 3, gnsp_n = 8, gnsp_s = 1, gnsp_samples = 100000;
  double gnsp_p = 1.0, gnsp_sigma = 1.0;
  std::uint64_t gnsp_seed = 0;
  gnsp->add_option("--A", gnsp_A, "matrix file (random Gaussian if omitted)");
  gnsp->add_option("--m", gnsp_m, "rows of the random matrix")->check(CLI::PositiveNumber);
  gnsp->add_option("--n", gnsp_n, "columns of the random matrix")->check(CLI::Range(2, 16));
  gnsp->add_option("--s", gnsp_s, "support size bound")->check(CLI::PositiveNumber);
  gnsp->add_option("--p", gnsp_p)->check(CLI::PositiveNumber);
  gnsp->add_option("--sigma", gnsp_sigma)->check(CLI::PositiveNumber);
  gnsp->add_option("--samples", gnsp_samples, "kernel directions to try")->check(CLI::PositiveNumber);
  gnsp->add_option("--seed", gnsp_seed);

  // gen
  auto* gen = app.add_subcommand("gen", "write matrices, signals, phantoms or masks");
  std::string gen_what, gen_out;
  MatrixFlags gen_matrix;
  std::size_t gen_k = 10, gen_lines = 7;
  std::uint64_t gen_seed = 0;
  gen->add_option("what", gen_what, "matrix, signal, phantom or mask")
      ->required()
      ->check(CLI::IsMember({"matrix", "signal", "phantom", "mask"}));
  gen->add_option("--out", gen_out, "output path")->required();
  gen_matrix.attach(gen);
  gen->add_option("--k", gen_k, "sparsity of the signal");
  gen->add_option("--lines", gen_lines, "radial lines of the mask")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  try {
    if (*recover) {
      const DenseMatrix A(io::load_matrix(a_path));
      const Vector y = io::load_vector(y_path);
      std::optional<Vector> truth;
      if (!truth_path.empty()) truth = io::load_vector(truth_path);
      const auto instance = ProblemInstance::make(A, y, truth);
      const SolverConfig cfg = recover_solver.config(noisy);
      const PenaltySpec spec = PenaltySpec::parse(penalty_label);
      const RecoveryResult r = h::recover(instance, spec, cfg, parse_algorithm(algorithm));
      if (!out_path.empty()) io::save_vector(out_path, r.estimate);
      std::cout << "penalty=" << spec.label() << " outer_iters=" << r.outer_iters
                << " converged=" << (r.converged ? 1 : 0) << " wall_time=" << r.wall_time;
      if (truth) std::cout << " rel_error=" << h::format_double(relative_error(r.estimate, *truth));
      std::cout << '\n';
      if (out_path.empty()) {
        for (Eigen::Index j = 0; j < r.estimate.size(); ++j) std::cout << h::format_double(r.estimate[j]) << '\n';
      }
    } else if (*phase) {
      h::ExperimentSpec spec;
      spec.kind = h::ExperimentKind::PhaseTransition;
      spec.matrix = phase_matrix.spec();
      spec.sparsity_grid = h::parse_grid(phase_k);
      spec.trials = phase_trials;
      spec.solver = phase_solver.config(false);
      spec.penalties = parse_penalties(phase_penalties);
      spec.base_seed = phase_seed;
      spec.success_tol = phase_tol;
      spec.gerf_algorithm = parse_algorithm(phase_algorithm);
      std::vector<std::string> failures;
      const auto rows = h::run_phase_transition(spec, &failures);
      report_failures(failures);
      emit(phase_out, rows, h::metadata_for(spec));
    } else if (*mse) {
      h::ExperimentSpec spec;
      spec.kind = h::ExperimentKind::MseStudy;
      spec.row_grid = h::parse_grid(mse_m);
      spec.matrix = h::MatrixSpec::gaussian(spec.row_grid.back(), mse_n);
      spec.sparsity_grid = {mse_k};
      spec.trials = mse_trials;
      spec.noise_sd = mse_noise;
      spec.lambda_rule = mse_lambda_rule == "noise" ? h::LambdaRule::NoiseScaled : h::LambdaRule::Fixed;
      spec.solver = mse_solver.config(true);
      if (spec.lambda_rule == h::LambdaRule::NoiseScaled && std::isnan(mse_solver.rho)) spec.solver.rho = 10.0;
      spec.penalties = parse_penalties(mse_penalties);
      spec.base_seed = mse_seed;
      std::vector<std::string> failures;
      const auto rows = h::run_mse_study(spec, &failures);
      report_failures(failures);
      emit(mse_out, rows, h::metadata_for(spec));
    } else if (*cmp) {
      const h::MatrixSpec ms = cmp_matrix.spec();
      const h::TrialSeeds seeds = h::trial_seeds(cmp_seed, 0, cmp_k);
      const DenseMatrix A = ms.generate(seeds.matrix);
      const Vector x = gen_sparse_signal(ms.n, cmp_k, seeds.signal);
      Vector y = A.values() * x;
      Rng noise(seeds.noise);
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += cmp_noise * noise.normal();
      const SolverConfig cfg = cmp_solver.config(cmp_noise > 0.0);
      const auto result = h::compare_irl1_dca(ProblemInstance::make(A, y, x), cmp_p, cmp_sigma, cfg, cmp_reps);
      h::ExperimentSpec spec;
      spec.kind = h::ExperimentKind::Irl1VsDca;
      spec.matrix = ms;
      spec.sparsity_grid = {cmp_k};
      spec.trials = cmp_reps;
      spec.solver = cfg;
      spec.penalties = {PenaltySpec::gerf(cmp_p, cmp_sigma)};
      spec.base_seed = cmp_seed;
      spec.noise_sd = cmp_noise;
      emit(cmp_out, h::irl1_vs_dca_rows(result, cmp_p, cmp_sigma, cmp_k, cmp_seed), h::metadata_for(spec));
    } else if (*mri) {
      mri_params.validate();
      const auto demo = h::run_mri_demo(mri_n, mri_lines, mri_methods, mri_params);
      std::filesystem::create_directories(mri_dir);
      const std::filesystem::path dir(mri_dir);
      imaging::write_pgm((dir / "truth.pgm").string(), demo.truth);
      imaging::write_mask_pgm((dir / "mask.pgm").string(), demo.mask);
      for (const auto& [method, image] : demo.images) {
        std::string file = method;
        for (char& c : file)
          if (c == ':' || c == ',' || c == '=') c = '_';
        imaging::write_pgm((dir / (file + ".pgm")).string(), image);
      }
      for (const auto& [method, rep] : demo.reports)
        std::cerr << method << ": outer_iters=" << rep.outer_iters << " residual=" << rep.constraint_residual
                  << " converged=" << (rep.converged ? 1 : 0) << '\n';
      h::Metadata meta;
      meta["artifact_version"] = h::kArtifactVersion;
      meta["kind"] = "mri";
      meta["n"] = std::to_string(mri_n);
      meta["lines"] = std::to_string(mri_lines);
      meta["sampled_fraction"] = h::format_double(static_cast<double>(imaging::mask_count(demo.mask)) /
                                                  static_cast<double>(mri_n * mri_n));
      meta["gradient_weight"] = h::format_double(mri_params.gradient_weight);
      meta["constraint_weight"] = h::format_double(mri_params.constraint_weight);
      meta["inner_max"] = std::to_string(mri_params.inner_max);
      meta["outer_max"] = std::to_string(mri_params.outer_max);
      meta["outer_tol"] = h::format_double(mri_params.outer_tol);
      emit(mri_out, demo.rows, meta);
    } else if (*gnsp) {
      const DenseMatrix A = gnsp_A.empty() ? gen_gaussian_matrix(gnsp_m, gnsp_n, gnsp_seed)
                                           : DenseMatrix(io::load_matrix(gnsp_A));
      const auto report = h::check_gnsp_sampled(A, gnsp_s, gnsp_p, gnsp_sigma, gnsp_samples, gnsp_seed);
      std::cout << "kernel_dim=" << report.kernel_dim << " samples=" << report.samples_checked << '\n';
      if (report.counterexample) {
        const auto& ce = *report.counterexample;
        std::cout << "counterexample support=";
        for (std::size_t i = 0; i < ce.support.size(); ++i) std::cout << (i ? "," : "") << ce.support[i];
        std::cout << "\nv=";
        for (Eigen::Index j = 0; j < ce.v.size(); ++j) std::cout << (j ? "," : "") << h::format_double(ce.v[j]);
        std::cout << "\nverified=" << (h::violates_gnsp(ce.v, ce.support, gnsp_p, gnsp_sigma) ? 1 : 0) << '\n';
      } else {
        std::cout << "no counterexample found (not a certificate)\n";
      }
    } else if (*gen) {
      if (gen_what == "matrix") {
        io::save_matrix(gen_out, gen_matrix.spec().generate(gen_seed).values());
      } else if (gen_what == "signal") {
        io::save_vector(gen_out, gen_sparse_signal(gen_matrix.n, gen_k, gen_seed));
      } else if (gen_what == "phantom") {
        imaging::write_pgm(gen_out, imaging::shepp_logan(gen_matrix.n), 65535);
      } else {
        imaging::write_mask_pgm(gen_out, imaging::radial_mask(gen_matrix.n, gen_lines));
      }
    }
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
