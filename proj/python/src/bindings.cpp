#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gerf/generators.hpp"
#include "gerf/harness.hpp"
#include "gerf/imaging.hpp"
#include "gerf/penalty.hpp"
#include "gerf/prox.hpp"
#include "gerf/solvers.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace gerf;

namespace {

SolverConfig config(double lambda, std::optional<double> rho, std::size_t outer_max, std::size_t inner_max,
                    double outer_tol) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.rho = rho ? *rho : 100.0 * lambda;
  cfg.outer_max = outer_max;
  cfg.inner_max = inner_max;
  cfg.outer_tol = outer_tol;
  return cfg;
}

py::dict result_dict(const SolverReport& r) {
  return py::dict("estimate"_a = r.result.estimate, "outer_iters"_a = r.result.outer_iters,
                  "objective_trace"_a = r.result.objective_trace, "converged"_a = r.result.converged,
                  "wall_time"_a = r.result.wall_time, "inner_iter_counts"_a = r.inner_iter_counts);
}

ProblemInstance instance(const RowMatrix& A, const Vector& y) { return ProblemInstance::make(DenseMatrix(A), y); }

imaging::ReconParams recon_params(double gradient_weight, double constraint_weight, std::size_t inner_max,
                                  std::size_t outer_max, double outer_tol) {
  imaging::ReconParams p;
  p.gradient_weight = gradient_weight;
  p.constraint_weight = constraint_weight;
  p.inner_max = inner_max;
  p.outer_max = outer_max;
  p.outer_tol = outer_tol;
  return p;
}

py::dict recon_dict(const imaging::ReconReport& r) {
  return py::dict("image"_a = r.image, "outer_iters"_a = r.outer_iters, "objective_trace"_a = r.objective_trace,
                  "constraint_residual"_a = r.constraint_residual, "converged"_a = r.converged);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GERF sparse recovery core";

  m.def("phi", &phi, "x"_a, "p"_a, "sigma"_a, "int_0^x exp(-(t/sigma)^p) dt");
  m.def(
      "penalty_value", [](const Vector& x, const std::string& penalty) {
        return penalty_value(x, PenaltySpec::parse(penalty));
      },
      "x"_a, "penalty"_a);
  m.def(
      "irl1_weights", [](const Vector& x, const std::string& penalty) {
        return irl1_weights(x, PenaltySpec::parse(penalty));
      },
      "x"_a, "penalty"_a);
  m.def("dc_gradient", &dc_gradient, "x"_a, "p"_a, "sigma"_a);
  m.def(
      "limit_diagnostics", [](const Vector& x, double p, double sigma) {
        const auto d = limit_diagnostics(x, p, sigma);
        return py::dict("l1_ratio"_a = d.l1_ratio, "l0_ratio"_a = d.l0_ratio);
      },
      "x"_a, "p"_a, "sigma"_a);

  m.def(
      "prox_gerf", [](double x, double mu, double p, double sigma) { return prox_gerf({x, mu, p, sigma}); }, "x"_a,
      "mu"_a, "p"_a, "sigma"_a);
  m.def("prox_gerf_p1", &prox_gerf_p1, "x"_a, "mu"_a, "sigma"_a);
  m.def("lambert_w0", &lambert_w0, "z"_a);
  m.def("soft_threshold", py::overload_cast<const Vector&, double>(&soft_threshold), "x"_a, "t"_a);
  m.def("hard_threshold", &hard_threshold, "x"_a, "t"_a);

  m.def(
      "irl1_solve",
      [](const RowMatrix& A, const Vector& y, const std::string& penalty, double lam, std::optional<double> rho,
         std::size_t outer_max, std::size_t inner_max, double outer_tol) {
        return result_dict(
            irl1_solve(instance(A, y), PenaltySpec::parse(penalty), config(lam, rho, outer_max, inner_max, outer_tol)));
      },
      "A"_a, "y"_a, "penalty"_a, "lam"_a = 1e-5, "rho"_a = py::none(), "outer_max"_a = 10, "inner_max"_a = 512,
      "outer_tol"_a = 1e-6);
  m.def(
      "dca_solve",
      [](const RowMatrix& A, const Vector& y, double p, double sigma, double lam, std::optional<double> rho,
         std::size_t outer_max, std::size_t inner_max, double outer_tol) {
        return result_dict(dca_solve(instance(A, y), p, sigma, config(lam, rho, outer_max, inner_max, outer_tol)));
      },
      "A"_a, "y"_a, "p"_a, "sigma"_a, "lam"_a = 1e-5, "rho"_a = py::none(), "outer_max"_a = 10, "inner_max"_a = 512,
      "outer_tol"_a = 1e-6);
  m.def(
      "lasso_admm",
      [](const RowMatrix& A, const Vector& y, double lam, std::optional<double> rho, std::size_t outer_max,
         std::size_t inner_max, double outer_tol) {
        return result_dict(lasso_admm(instance(A, y), config(lam, rho, outer_max, inner_max, outer_tol)));
      },
      "A"_a, "y"_a, "lam"_a = 1e-5, "rho"_a = py::none(), "outer_max"_a = 10, "inner_max"_a = 512,
      "outer_tol"_a = 1e-6);
  m.def("relative_error", py::overload_cast<const Vector&, const Vector&>(&relative_error), "x_hat"_a, "x"_a);

  m.def(
      "gaussian_matrix", [](std::size_t rows, std::size_t cols, std::uint64_t seed) {
        return gen_gaussian_matrix(rows, cols, seed).values();
      },
      "m"_a, "n"_a, "seed"_a);
  m.def(
      "oversampled_dct", [](std::size_t rows, std::size_t cols, double F, std::uint64_t seed) {
        return gen_oversampled_dct(rows, cols, F, seed).values();
      },
      "m"_a, "n"_a, "F"_a, "seed"_a);
  m.def("sparse_signal", &gen_sparse_signal, "n"_a, "k"_a, "seed"_a);
  m.def(
      "oracle_mse",
      [](const RowMatrix& A, const std::vector<std::size_t>& support, double noise_sd) {
        return harness::oracle_mse(DenseMatrix(A), support, noise_sd);
      },
      "A"_a, "support"_a, "noise_sd"_a);
  m.def(
      "gnsp_check",
      [](const RowMatrix& A, std::size_t s, double p, double sigma, std::size_t n_samples, std::uint64_t seed) {
        const auto r = harness::check_gnsp_sampled(DenseMatrix(A), s, p, sigma, n_samples, seed);
        py::object cex = py::none();
        if (r.counterexample) cex = py::make_tuple(r.counterexample->v, r.counterexample->support);
        return py::dict("counterexample"_a = cex, "samples_checked"_a = r.samples_checked,
                        "kernel_dim"_a = r.kernel_dim);
      },
      "A"_a, "s"_a, "p"_a, "sigma"_a, "n_samples"_a = 100000, "seed"_a = 0);

  m.def("shepp_logan", &imaging::shepp_logan, "n"_a);
  m.def("radial_mask", &imaging::radial_mask, "n"_a, "lines"_a);
  m.def(
      "recon",
      [](const Image& truth, const imaging::Mask& mask, const std::string& method, double gradient_weight,
         double constraint_weight, std::size_t inner_max, std::size_t outer_max, double outer_tol) -> py::dict {
        const auto prob = imaging::ImagingProblem::from_image(truth, mask);
        const auto params = recon_params(gradient_weight, constraint_weight, inner_max, outer_max, outer_tol);
        if (method == "zero_fill") return py::dict("image"_a = imaging::zero_fill_recon(prob));
        if (method == "tv") return recon_dict(imaging::tv_recon(prob, params));
        if (method == "l1l2") return recon_dict(imaging::l1l2_grad_recon(prob, params));
        const auto g = PenaltySpec::parse(method).as_gerf();
        return recon_dict(imaging::gerf_grad_recon(prob, g.p, g.sigma, params));
      },
      "truth"_a, "mask"_a, "method"_a = "gerf:p=1,sigma=1", "gradient_weight"_a = 10.0,
      "constraint_weight"_a = 10.0, "inner_max"_a = 200, "outer_max"_a = 20, "outer_tol"_a = 1e-6,
      "Reconstruct from the masked unitary DFT of `truth`.");
}
