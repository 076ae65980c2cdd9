#include "nfh/ctf.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nfh/fft.hpp"

namespace nfh {

namespace {

void check_weights_shape(const RegularizationWeights& weights, Index pny, Index pnx) {
  if (weights.alpha.rows() != pny || weights.alpha.cols() != pnx)
    throw std::invalid_argument(
        "regularization weights were built on the wrong grid (expected the padded shape)");
}

// Everything the quadratic solvers need on the padded grid: transfer
// factors, the data-side spectrum b = 2 * sum_j m_j * F(I_j - 1), and the
// regularized denominator without/with the rho term.
struct LinSystem {
  Index ny = 0, nx = 0;
  Index pny = 0, pnx = 0;
  ComplexField b;
  RealImage quad_denom;  // alpha + 4 * sum_j m_j^2
};

LinSystem build_lin_system(const HologramSet& data, const MaterialCoupling& coupling,
                           const RegularizationWeights& weights, const Padding& padding) {
  validate_hologram_set(data);
  LinSystem sys;
  sys.ny = data.ny();
  sys.nx = data.nx();
  sys.pny = padded_extent(sys.ny, padding.factor);
  sys.pnx = padded_extent(sys.nx, padding.factor);
  check_weights_shape(weights, sys.pny, sys.pnx);
  const FrequencyGrid grid = frequency_sq_grid(sys.pny, sys.pnx);
  // Residual images I - 1 vanish in vacuum, so constant-mode margins are 0.
  Padding residual_pad = padding;
  residual_pad.constant_value = 0.0;
  sys.b = ComplexField::Zero(sys.pny, sys.pnx);
  RealImage msq = RealImage::Zero(sys.pny, sys.pnx);
  for (int j = 0; j < data.count(); ++j) {
    const RealImage m = combined_ctf(ctf_factors(data.fresnel_numbers[static_cast<std::size_t>(j)], grid), coupling);
    const RealImage residual = data.holograms[static_cast<std::size_t>(j)] - 1.0;
    sys.b += 2.0 * m * fft2(to_complex(pad_image(residual, residual_pad)));
    msq += m.square();
  }
  sys.quad_denom = weights.alpha + 4.0 * msq;
  return sys;
}

}  // namespace

void validate_hologram_set(const HologramSet& data) {
  if (data.holograms.empty()) throw std::invalid_argument("hologram set: empty");
  if (data.holograms.size() != data.fresnel_numbers.size())
    throw std::invalid_argument("hologram set: hologram/Fresnel-number count mismatch");
  const Index ny = data.ny(), nx = data.nx();
  if (ny < 1 || nx < 1) throw std::invalid_argument("hologram set: empty images");
  for (const RealImage& img : data.holograms) {
    if (img.rows() != ny || img.cols() != nx)
      throw std::invalid_argument("hologram set: inconsistent image shapes");
    if (!all_finite(img)) throw std::invalid_argument("hologram set: non-finite intensities");
    if ((img < 0.0).any()) throw std::invalid_argument("hologram set: negative intensities");
  }
  for (double f : data.fresnel_numbers)
    if (!(f > 0.0) || !std::isfinite(f))
      throw std::invalid_argument("hologram set: Fresnel numbers must be positive and finite");
}

double tikhonov_lin_value(const RealImage& phi, const HologramSet& data,
                          const MaterialCoupling& coupling, const RegularizationWeights& weights,
                          const Padding& padding) {
  validate_hologram_set(data);
  if (phi.rows() != data.ny() || phi.cols() != data.nx())
    throw std::invalid_argument("tikhonov_lin_value: phase/data shape mismatch");
  const RealImage u = pad_image(phi, padding);
  check_weights_shape(weights, u.rows(), u.cols());
  const FrequencyGrid grid = frequency_sq_grid(u.rows(), u.cols());
  const ComplexField uhat = fft2(to_complex(u));
  double value = (weights.alpha * uhat.abs2()).sum();
  for (int j = 0; j < data.count(); ++j) {
    const RealImage m = combined_ctf(ctf_factors(data.fresnel_numbers[static_cast<std::size_t>(j)], grid), coupling);
    const RealImage model =
        1.0 + crop_image(ifft2(ComplexField(2.0 * m * uhat)).real(), phi.rows(), phi.cols());
    value += (model - data.holograms[static_cast<std::size_t>(j)]).square().sum();
  }
  return value;
}

RealImage ctf_reconstruct(const HologramSet& data, const MaterialCoupling& coupling,
                          const RegularizationWeights& weights, const Padding& padding) {
  const LinSystem sys = build_lin_system(data, coupling, weights, padding);
  const ComplexField phi_hat = sys.b / sys.quad_denom;
  return crop_image(ifft2(phi_hat).real(), sys.ny, sys.nx);
}

CctfResult cctf_reconstruct(const HologramSet& data, const MaterialCoupling& coupling,
                            const RegularizationWeights& weights, const ConstraintSet& constraints,
                            const CctfOptions& options, const Padding& padding) {
  if (!(options.rho > 0.0) || !std::isfinite(options.rho))
    throw std::invalid_argument("cctf: rho must be positive and finite");
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("cctf: tolerance must be positive");
  if (options.max_iterations < 1) throw std::invalid_argument("cctf: max_iterations must be >= 1");
  const LinSystem sys = build_lin_system(data, coupling, weights, padding);
  validate_constraints(constraints, sys.ny, sys.nx);

  const double rho = options.rho;
  const RealImage denom = rho + sys.quad_denom;
  Padding anchor_pad = padding;
  anchor_pad.constant_value = 0.0;  // splitting variables have no background

  // One forward and one inverse transform; everything else is pointwise.
  const auto filter_update = [&](const RealImage& anchor) {
    const ComplexField num = rho * fft2(to_complex(pad_image(anchor, anchor_pad))) + sys.b;
    return crop_image(ifft2(ComplexField(num / denom)).real(), sys.ny, sys.nx);
  };

  const double eps = std::numeric_limits<double>::epsilon();
  const auto start = std::chrono::steady_clock::now();

  RealImage lambda = RealImage::Zero(sys.ny, sys.nx);
  RealImage psi = RealImage::Zero(sys.ny, sys.nx);
  RealImage lambda_hat = lambda, psi_hat = psi;
  RealImage lambda_prev = lambda, psi_prev = psi;
  double t = 1.0;
  double combined_prev = std::numeric_limits<double>::infinity();

  CctfResult result;
  result.phi = psi;
  for (int k = 1; k <= options.max_iterations; ++k) {
    const RealImage anchor =
        options.variant == AdmmVariant::Direct ? lambda_hat : RealImage(psi_hat - lambda_hat);
    const RealImage phi = filter_update(anchor);
    const RealImage psi_next = project(phi + lambda_hat, constraints);
    const RealImage lambda_next = lambda_hat + phi - psi_next;

    const double primal = l2_norm(RealImage(phi - psi_next)) /
                          std::max({l2_norm(phi), l2_norm(psi_next), eps});
    const double dual =
        rho * l2_norm(RealImage(psi_next - psi)) / std::max(l2_norm(lambda_next), eps);

    TraceRow row;
    row.iteration = k;
    row.primal_residual = primal;
    row.dual_residual = dual;
    row.stepsize = rho;
    row.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.trace.rows.push_back(row);

    const double combined = (lambda_next - lambda_hat).square().sum() +
                            (psi_next - psi_hat).square().sum();

    lambda_prev = lambda;
    psi_prev = psi;
    lambda = lambda_next;
    psi = psi_next;
    result.phi = psi;

    if (primal < options.tolerance && dual < options.tolerance) {
      result.trace.converged = true;
      result.trace.message = "converged";
      return result;
    }

    if (!options.accelerate) {
      lambda_hat = lambda;
      psi_hat = psi;
    } else if (combined < combined_prev) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      lambda_hat = lambda + beta * (lambda - lambda_prev);
      psi_hat = psi + beta * (psi - psi_prev);
      t = t_next;
      combined_prev = combined;
    } else {
      // Momentum overshot: restart from the previous accepted iterates.
      t = 1.0;
      lambda_hat = lambda_prev;
      psi_hat = psi_prev;
    }
  }
  result.trace.converged = false;
  result.trace.message = "max iterations reached without convergence";
  return result;
}

}  // namespace nfh
