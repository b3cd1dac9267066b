#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "gerf/core.hpp"

namespace gerf::imaging {

using Complex = std::complex<double>;
using ComplexImage = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
/// k-space sampling set; entry (r, c) is the frequency pair (r, c) mod n.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Forward differences with periodic wraparound: gx along columns, gy along rows.
struct GradientField {
  Image gx;
  Image gy;
};

GradientField grad(const Image& u);
/// Negative adjoint of grad: <grad(u), g> = -<u, div(g)>.
Image div(const GradientField& g);

/// Unitary 2-D DFT on an n x n grid. Owns FFTW plans and work buffers, so an
/// instance must not be used from two threads at once.
class Fourier2D {
 public:
  explicit Fourier2D(std::size_t n);
  ~Fourier2D();
  Fourier2D(const Fourier2D&) = delete;
  Fourier2D& operator=(const Fourier2D&) = delete;

  std::size_t n() const { return n_; }
  ComplexImage forward(const ComplexImage& u);
  ComplexImage forward(const Image& u);
  ComplexImage inverse(const ComplexImage& k);

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

/// Sampled coefficients (mask-true entries of the unitary DFT, row-major order).
ComplexVector fourier_sample(const Image& u, const Mask& mask);
/// Adjoint of fourier_sample: zero-filled k-space, inverse transformed.
ComplexImage fourier_adjoint(const ComplexVector& f, const Mask& mask);

/// Modified (high-contrast) Shepp-Logan phantom, values in [0, 1].
Image shepp_logan(std::size_t n);

/// Radial lines through DC at angles i*pi/L, sampled every unit radius and
/// rounded to the nearest grid frequency; point symmetric.
Mask radial_mask(std::size_t n, std::size_t lines);

std::size_t mask_count(const Mask& mask);

/// Data for min J(Du) subject to R F u = f.
struct ImagingProblem {
  std::size_t n = 0;
  Mask mask;
  ComplexVector f;

  static ImagingProblem make(Mask mask, ComplexVector f);
  static ImagingProblem from_image(const Image& u, const Mask& mask);
};

/// Split Bregman weights and iteration caps.
struct ReconParams {
  double gradient_weight = 10.0;    ///< weight on ||d - Du - b||^2
  double constraint_weight = 10.0;  ///< weight on ||R F u - f_k||^2
  std::size_t inner_max = 200;      ///< split Bregman sweeps per DCA step
  std::size_t outer_max = 20;       ///< DCA steps
  double outer_tol = 1e-6;          ///< relative change of u

  void validate() const;
};

struct ReconReport {
  Image image;
  std::size_t outer_iters = 0;
  std::vector<double> objective_trace;  ///< regularizer of Du after each outer step
  double constraint_residual = 0.0;     ///< ||R F u - f|| / ||f||
  bool converged = false;
};

/// Shape of the linearization vector q used by the DCA outer loop.
enum class GradientPrior { TV, GERF, L1MinusL2 };

struct GradientPenalty {
  GradientPrior prior = GradientPrior::TV;
  double p = 1.0;
  double sigma = 1.0;
};

/// DCA + split Bregman. The first step uses q = 0 (plain TV); later steps take q
/// from the image the previous step ended on.
ReconReport gradient_recon(const ImagingProblem& prob, const GradientPenalty& penalty, const ReconParams& params);

ReconReport gerf_grad_recon(const ImagingProblem& prob, double p, double sigma, const ReconParams& params = {});
ReconReport tv_recon(const ImagingProblem& prob, const ReconParams& params = {});
ReconReport l1l2_grad_recon(const ImagingProblem& prob, const ReconParams& params = {});
/// Real part of the adjoint applied to the data.
Image zero_fill_recon(const ImagingProblem& prob);

/// q field for each prior (zero for TV).
GradientField linearization(const GradientField& du, const GradientPenalty& penalty);
/// Regularizer value: J_{p,sigma}(Du), ||Du||_1, or ||Du||_1 - sum_j |(Du)_j|_2.
double gradient_regularizer(const GradientField& du, const GradientPenalty& penalty);

/// Image I/O: binary PGM (maxval 255 or 65535), values clamped to [0, 1].
void write_pgm(const std::string& path, const Image& u, int maxval = 255);
Image read_pgm(const std::string& path);
void write_mask_pgm(const std::string& path, const Mask& mask);
Mask read_mask_pgm(const std::string& path);

}  // namespace gerf::imaging
