#include "gerf/imaging.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "gerf/penalty.hpp"

namespace gerf::imaging {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_square(const Image& u, const char* what) {
  if (u.rows() != u.cols() || u.rows() == 0) throw ContractError(std::string(what) + ": image must be square");
}

double soft(double v, double t) {
  const double mag = std::fabs(v) - t;
  return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

}  // namespace

GradientField grad(const Image& u) {
  const Eigen::Index rows = u.rows(), cols = u.cols();
  GradientField g{Image(rows, cols), Image(rows, cols)};
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index rn = (r + 1) % rows;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Eigen::Index cn = (c + 1) % cols;
      g.gx(r, c) = u(r, cn) - u(r, c);
      g.gy(r, c) = u(rn, c) - u(r, c);
    }
  }
  return g;
}

Image div(const GradientField& g) {
  const Eigen::Index rows = g.gx.rows(), cols = g.gx.cols();
  if (g.gy.rows() != rows || g.gy.cols() != cols) throw ContractError("div: component shapes differ");
  Image out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index rp = (r + rows - 1) % rows;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Eigen::Index cp = (c + cols - 1) % cols;
      out(r, c) = g.gx(r, c) - g.gx(r, cp) + g.gy(r, c) - g.gy(rp, c);
    }
  }
  return out;
}

struct Fourier2D::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

Fourier2D::Fourier2D(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n == 0) throw ContractError("Fourier2D: empty grid");
  const int size = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  fftw_complex* buffer = fftw_alloc_complex(n * n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_dft_2d(size, size, buffer, buffer, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft_2d(size, size, buffer, buffer, FFTW_BACKWARD, flags);
  fftw_free(buffer);
  if (!plans_->forward || !plans_->backward) throw NumericalError("Fourier2D: FFTW planning failed");
}

Fourier2D::~Fourier2D() {
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

ComplexImage Fourier2D::forward(const ComplexImage& u) {
  if (static_cast<std::size_t>(u.rows()) != n_ || static_cast<std::size_t>(u.cols()) != n_)
    throw ContractError("Fourier2D: grid size mismatch");
  ComplexImage out = u;
  auto* data = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans_->forward, data, data);
  out /= static_cast<double>(n_);
  return out;
}

ComplexImage Fourier2D::forward(const Image& u) { return forward(ComplexImage(u.cast<Complex>())); }

ComplexImage Fourier2D::inverse(const ComplexImage& k) {
  if (static_cast<std::size_t>(k.rows()) != n_ || static_cast<std::size_t>(k.cols()) != n_)
    throw ContractError("Fourier2D: grid size mismatch");
  ComplexImage out = k;
  auto* data = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans_->backward, data, data);
  out /= static_cast<double>(n_);
  return out;
}

std::size_t mask_count(const Mask& mask) { return static_cast<std::size_t>(mask.count()); }

namespace {

ComplexVector gather(const ComplexImage& k, const Mask& mask) {
  ComplexVector f(static_cast<Eigen::Index>(mask_count(mask)));
  Eigen::Index i = 0;
  for (Eigen::Index r = 0; r < mask.rows(); ++r)
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      if (mask(r, c)) f[i++] = k(r, c);
  return f;
}

ComplexImage scatter(const ComplexVector& f, const Mask& mask) {
  if (static_cast<std::size_t>(f.size()) != mask_count(mask))
    throw ContractError("fourier_adjoint: coefficient count does not match the mask");
  ComplexImage k = ComplexImage::Zero(mask.rows(), mask.cols());
  Eigen::Index i = 0;
  for (Eigen::Index r = 0; r < mask.rows(); ++r)
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      if (mask(r, c)) k(r, c) = f[i++];
  return k;
}

}  // namespace

ComplexVector fourier_sample(const Image& u, const Mask& mask) {
  check_square(u, "fourier_sample");
  if (mask.rows() != u.rows() || mask.cols() != u.cols()) throw ContractError("fourier_sample: mask shape mismatch");
  Fourier2D ft(static_cast<std::size_t>(u.rows()));
  return gather(ft.forward(u), mask);
}

ComplexImage fourier_adjoint(const ComplexVector& f, const Mask& mask) {
  if (mask.rows() != mask.cols() || mask.rows() == 0) throw ContractError("fourier_adjoint: mask must be square");
  Fourier2D ft(static_cast<std::size_t>(mask.rows()));
  return ft.inverse(scatter(f, mask));
}

namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan (Toft) parameters: intensity, semi-axes, center, rotation.
constexpr std::array<Ellipse, 10> kSheppLogan = {{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

}  // namespace

Image shepp_logan(std::size_t n) {
  if (n < 16) throw ContractError("shepp_logan: n must be at least 16");
  const auto size = static_cast<Eigen::Index>(n);
  const double half = 0.5 * static_cast<double>(n - 1);
  Image u = Image::Zero(size, size);
  for (const auto& e : kSheppLogan) {
    const double phi = e.phi_deg * std::numbers::pi / 180.0;
    const double cp = std::cos(phi), sp = std::sin(phi);
    for (Eigen::Index r = 0; r < size; ++r) {
      const double y = (half - static_cast<double>(r)) / half - e.y0;
      for (Eigen::Index c = 0; c < size; ++c) {
        const double x = (static_cast<double>(c) - half) / half - e.x0;
        const double s = (x * cp + y * sp) / e.a;
        const double t = (y * cp - x * sp) / e.b;
        if (s * s + t * t <= 1.0) u(r, c) += e.intensity;
      }
    }
  }
  return u.cwiseMax(0.0).cwiseMin(1.0);
}

Mask radial_mask(std::size_t n, std::size_t lines) {
  if (lines == 0) throw ContractError("radial_mask: need at least one line");
  if (n == 0) throw ContractError("radial_mask: empty grid");
  const auto size = static_cast<Eigen::Index>(n);
  const double limit = 0.5 * static_cast<double>(n);
  Mask mask = Mask::Constant(size, size, false);
  auto wrap = [size](long k) { return static_cast<Eigen::Index>(((k % size) + size) % size); };
  const long reach = static_cast<long>(std::ceil(limit * std::numbers::sqrt2));
  for (std::size_t i = 0; i < lines; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(lines);
    const double ct = std::cos(theta), st = std::sin(theta);
    for (long t = -reach; t <= reach; ++t) {
      const double kx = std::round(static_cast<double>(t) * ct);
      const double ky = std::round(static_cast<double>(t) * st);
      if (std::fabs(kx) > limit || std::fabs(ky) > limit) continue;
      mask(wrap(static_cast<long>(ky)), wrap(static_cast<long>(kx))) = true;
    }
  }
  mask(0, 0) = true;
  // Conjugate symmetry: k in R implies -k in R.
  for (Eigen::Index r = 0; r < size; ++r)
    for (Eigen::Index c = 0; c < size; ++c)
      if (mask(r, c)) mask((size - r) % size, (size - c) % size) = true;
  return mask;
}

ImagingProblem ImagingProblem::make(Mask mask, ComplexVector f) {
  if (mask.rows() != mask.cols() || mask.rows() == 0) throw ContractError("ImagingProblem: mask must be square");
  if (!mask(0, 0)) throw ContractError("ImagingProblem: mask must include the DC coefficient");
  if (static_cast<std::size_t>(f.size()) != mask_count(mask))
    throw ContractError("ImagingProblem: coefficient count does not match the mask");
  const auto n = static_cast<std::size_t>(mask.rows());
  return ImagingProblem{n, std::move(mask), std::move(f)};
}

ImagingProblem ImagingProblem::from_image(const Image& u, const Mask& mask) {
  return make(mask, fourier_sample(u, mask));
}

void ReconParams::validate() const {
  if (!(gradient_weight > 0.0) || !(constraint_weight > 0.0))
    throw ContractError("ReconParams: split Bregman weights must be positive");
  if (inner_max == 0 || outer_max == 0) throw ContractError("ReconParams: iteration caps must be positive");
  if (!(outer_tol > 0.0)) throw ContractError("ReconParams: outer_tol must be positive");
}

GradientField linearization(const GradientField& du, const GradientPenalty& penalty) {
  const Eigen::Index rows = du.gx.rows(), cols = du.gx.cols();
  GradientField q{Image::Zero(rows, cols), Image::Zero(rows, cols)};
  switch (penalty.prior) {
    case GradientPrior::TV:
      break;
    case GradientPrior::GERF: {
      auto rule = [&](double g) {
        if (g == 0.0) return 0.0;
        return std::copysign(-std::expm1(-std::pow(std::fabs(g) / penalty.sigma, penalty.p)), g);
      };
      q.gx = du.gx.unaryExpr(rule);
      q.gy = du.gy.unaryExpr(rule);
      break;
    }
    case GradientPrior::L1MinusL2:
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
          const double mag = std::hypot(du.gx(r, c), du.gy(r, c));
          if (mag > 0.0) {
            q.gx(r, c) = du.gx(r, c) / mag;
            q.gy(r, c) = du.gy(r, c) / mag;
          }
        }
      break;
  }
  return q;
}

double gradient_regularizer(const GradientField& du, const GradientPenalty& penalty) {
  switch (penalty.prior) {
    case GradientPrior::TV:
      return du.gx.cwiseAbs().sum() + du.gy.cwiseAbs().sum();
    case GradientPrior::GERF: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < du.gx.size(); ++i) {
        sum += phi(std::fabs(du.gx.data()[i]), penalty.p, penalty.sigma);
        sum += phi(std::fabs(du.gy.data()[i]), penalty.p, penalty.sigma);
      }
      return sum;
    }
    case GradientPrior::L1MinusL2: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < du.gx.size(); ++i) {
        const double gx = du.gx.data()[i], gy = du.gy.data()[i];
        sum += std::fabs(gx) + std::fabs(gy) - std::hypot(gx, gy);
      }
      return sum;
    }
  }
  return 0.0;
}

Image zero_fill_recon(const ImagingProblem& prob) { return fourier_adjoint(prob.f, prob.mask).real(); }

ReconReport gradient_recon(const ImagingProblem& prob, const GradientPenalty& penalty, const ReconParams& params) {
  params.validate();
  if (penalty.prior == GradientPrior::GERF && (!(penalty.p > 0.0) || !(penalty.sigma > 0.0)))
    throw DomainError("gradient_recon: GERF prior requires p > 0 and sigma > 0");
  const std::size_t n = prob.n;
  const auto size = static_cast<Eigen::Index>(n);
  const double mu = params.constraint_weight;
  const double lambda = params.gradient_weight;

  Fourier2D ft(n);
  const ComplexImage data = scatter(prob.f, prob.mask);
  const double data_norm = prob.f.norm();

  // Fourier symbol of mu R^T R + lambda D^T D under periodic boundaries.
  Image denom(size, size);
  for (Eigen::Index r = 0; r < size; ++r) {
    const double sr = std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
    for (Eigen::Index c = 0; c < size; ++c) {
      const double sc = std::sin(std::numbers::pi * static_cast<double>(c) / static_cast<double>(n));
      denom(r, c) = (prob.mask(r, c) ? mu : 0.0) + lambda * 4.0 * (sr * sr + sc * sc);
    }
  }

  ReconReport report;
  Image u = zero_fill_recon(prob);
  ComplexImage bregman_data = data;
  GradientField d{Image::Zero(size, size), Image::Zero(size, size)};
  GradientField b{Image::Zero(size, size), Image::Zero(size, size)};
  ComplexImage spectrum;

  // DCA starts from u = 0, so the first subproblem is plain TV.
  Image reference = Image::Zero(size, size);
  double residual_sq = 0.0;
  for (std::size_t outer = 0; outer < params.outer_max; ++outer) {
    const Image u_prev = u;
    const GradientField q = linearization(grad(reference), penalty);
    for (std::size_t inner = 0; inner < params.inner_max; ++inner) {
      // u <- argmin mu/2 ||R F u - f_k||^2 + lambda/2 ||d - Du - b||^2
      const GradientField shifted{d.gx - b.gx, d.gy - b.gy};
      const Image rhs = -lambda * div(shifted);
      spectrum = ft.forward(rhs);
      spectrum += mu * bregman_data;
      spectrum.array() /= denom.array().cast<Complex>();
      u = ft.inverse(spectrum).real();

      // d <- argmin ||d||_1 - <q, d> + lambda/2 ||d - Du - b||^2
      const GradientField du = grad(u);
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double vx = du.gx.data()[i] + b.gx.data()[i];
        const double vy = du.gy.data()[i] + b.gy.data()[i];
        d.gx.data()[i] = soft(vx + q.gx.data()[i] / lambda, 1.0 / lambda);
        d.gy.data()[i] = soft(vy + q.gy.data()[i] / lambda, 1.0 / lambda);
        b.gx.data()[i] = vx - d.gx.data()[i];
        b.gy.data()[i] = vy - d.gy.data()[i];
      }

      // Add back the data residual (Bregman update for R F u = f).
      residual_sq = 0.0;
      for (Eigen::Index r = 0; r < size; ++r)
        for (Eigen::Index c = 0; c < size; ++c)
          if (prob.mask(r, c)) {
            const Complex res = data(r, c) - spectrum(r, c);
            residual_sq += std::norm(res);
            bregman_data(r, c) += res;
          }
    }
    reference = u;
    report.constraint_residual = data_norm > 0.0 ? std::sqrt(residual_sq) / data_norm : std::sqrt(residual_sq);
    report.objective_trace.push_back(gradient_regularizer(grad(u), penalty));
    ++report.outer_iters;
    const double change = (u - u_prev).norm() / std::max(u_prev.norm(), 1e-300);
    if (change < params.outer_tol) {
      report.converged = true;
      break;
    }
  }
  if (!std::isfinite(u.sum())) throw NumericalError("gradient_recon: iterate diverged");
  report.image = std::move(u);
  return report;
}

ReconReport gerf_grad_recon(const ImagingProblem& prob, double p, double sigma, const ReconParams& params) {
  return gradient_recon(prob, GradientPenalty{GradientPrior::GERF, p, sigma}, params);
}

ReconReport tv_recon(const ImagingProblem& prob, const ReconParams& params) {
  return gradient_recon(prob, GradientPenalty{GradientPrior::TV, 1.0, 1.0}, params);
}

ReconReport l1l2_grad_recon(const ImagingProblem& prob, const ReconParams& params) {
  return gradient_recon(prob, GradientPenalty{GradientPrior::L1MinusL2, 1.0, 1.0}, params);
}

void write_pgm(const std::string& path, const Image& u, int maxval) {
  if (maxval != 255 && maxval != 65535) throw ContractError("write_pgm: maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot open '" + path + "' for writing");
  out << "P5\n" << u.cols() << ' ' << u.rows() << '\n' << maxval << '\n';
  for (Eigen::Index r = 0; r < u.rows(); ++r)
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      const double v = std::clamp(u(r, c), 0.0, 1.0);
      const auto level = static_cast<unsigned>(std::lround(v * maxval));
      if (maxval == 255) {
        out.put(static_cast<char>(level));
      } else {
        out.put(static_cast<char>(level >> 8));
        out.put(static_cast<char>(level & 0xFF));
      }
    }
}

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open '" + path + "'");
  std::string magic;
  in >> magic;
  if (magic != "P5") throw ContractError("read_pgm: only binary P5 graymaps are supported");
  auto next_int = [&in]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    long v;
    if (!(in >> v)) throw ContractError("read_pgm: malformed header");
    return v;
  };
  const long width = next_int(), height = next_int(), maxval = next_int();
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) throw ContractError("read_pgm: bad header values");
  in.get();
  Image u(height, width);
  for (Eigen::Index r = 0; r < height; ++r)
    for (Eigen::Index c = 0; c < width; ++c) {
      long level;
      if (maxval < 256) {
        const int ch = in.get();
        if (ch == EOF) throw ContractError("read_pgm: truncated pixel data");
        level = ch;
      } else {
        const int hi = in.get(), lo = in.get();
        if (lo == EOF) throw ContractError("read_pgm: truncated pixel data");
        level = (hi << 8) | lo;
      }
      u(r, c) = static_cast<double>(level) / static_cast<double>(maxval);
    }
  return u;
}

void write_mask_pgm(const std::string& path, const Mask& mask) { write_pgm(path, mask.cast<double>().matrix(), 255); }

Mask read_mask_pgm(const std::string& path) { return read_pgm(path).array() > 0.5; }

}  // namespace gerf::imaging
