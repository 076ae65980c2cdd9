#include "nfh/forward.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nfh/fft.hpp"
#include "nfh/propagate.hpp"

namespace nfh {

namespace {

void check_phase(const RealImage& phi) {
  if (phi.rows() < 1 || phi.cols() < 1) throw std::invalid_argument("forward model: empty phase");
  if (!all_finite(phi)) throw std::invalid_argument("forward model: non-finite phase values");
}

ComplexField exit_wave(const RealImage& padded_phi, const MaterialCoupling& coupling) {
  const Complex gamma = coupling.gamma();
  return padded_phi.unaryExpr([gamma](double p) { return std::exp(gamma * p); });
}

}  // namespace

MaterialCoupling::MaterialCoupling(double c) : c_beta_delta(c) {
  if (!(c >= 0.0) || !std::isfinite(c))
    throw std::invalid_argument("MaterialCoupling: c_beta_delta must be finite and >= 0");
}

CtfFactors ctf_factors(double fresnel_number, const FrequencyGrid& grid) {
  if (!(fresnel_number > 0.0) || !std::isfinite(fresnel_number))
    throw std::invalid_argument("ctf_factors: Fresnel number must be positive and finite");
  CtfFactors out;
  out.fresnel_number = fresnel_number;
  const RealImage arg = grid.xi2 / (4.0 * std::numbers::pi * fresnel_number);
  out.s = arg.sin();
  out.c = arg.cos();
  return out;
}

RealImage combined_ctf(const CtfFactors& factors, const MaterialCoupling& coupling) {
  return factors.s - coupling.c_beta_delta * factors.c;
}

RealImage linear_model(const RealImage& phi, const MaterialCoupling& coupling,
                       double fresnel_number, const Padding& padding) {
  check_phase(phi);
  const RealImage u = pad_image(phi, padding);
  const FrequencyGrid grid = frequency_sq_grid(u.rows(), u.cols());
  const RealImage m = combined_ctf(ctf_factors(fresnel_number, grid), coupling);
  const ComplexField filtered = ifft2(ComplexField(fft2(to_complex(u)) * 2.0 * m));
  return 1.0 + crop_image(filtered.real(), phi.rows(), phi.cols());
}

RealImage nonlinear_model(const RealImage& phi, const MaterialCoupling& coupling,
                          double fresnel_number, const Padding& padding) {
  check_phase(phi);
  const RealImage u = pad_image(phi, padding);
  const ComplexField w = fresnel_propagate(exit_wave(u, coupling), fresnel_number);
  return crop_image(w.abs2(), phi.rows(), phi.cols());
}

RealImage frechet_apply(const RealImage& phi, const RealImage& direction,
                        const MaterialCoupling& coupling, double fresnel_number,
                        const Padding& padding) {
  check_phase(phi);
  if (direction.rows() != phi.rows() || direction.cols() != phi.cols())
    throw std::invalid_argument("frechet_apply: direction shape mismatch");
  const Complex gamma = coupling.gamma();
  const RealImage u = pad_image(phi, padding);
  const ComplexField e = exit_wave(u, coupling);
  const FrequencyGrid grid = frequency_sq_grid(u.rows(), u.cols());
  const FresnelKernel kernel = fresnel_kernel(fresnel_number, grid);
  const ComplexField w = fresnel_propagate(e, kernel);
  const ComplexField v =
      fresnel_propagate(ComplexField(e * gamma * to_complex(pad_linear(direction, padding))), kernel);
  return crop_image(RealImage(2.0 * (w.conjugate() * v).real()), phi.rows(), phi.cols());
}

RealImage frechet_adjoint(const RealImage& phi, const RealImage& intensity_direction,
                          const MaterialCoupling& coupling, double fresnel_number,
                          const Padding& padding) {
  check_phase(phi);
  if (intensity_direction.rows() != phi.rows() || intensity_direction.cols() != phi.cols())
    throw std::invalid_argument("frechet_adjoint: direction shape mismatch");
  const Complex gamma = coupling.gamma();
  const RealImage u = pad_image(phi, padding);
  const ComplexField e = exit_wave(u, coupling);
  const FrequencyGrid grid = frequency_sq_grid(u.rows(), u.cols());
  const FresnelKernel kernel = fresnel_kernel(fresnel_number, grid);
  const ComplexField w = fresnel_propagate(e, kernel);
  const ComplexField back = fresnel_backpropagate(
      ComplexField(w * to_complex(zero_embed(intensity_direction, u.rows(), u.cols()))), kernel);
  const RealImage g_padded = 2.0 * ((gamma * e).conjugate() * back).real();
  return pad_linear_adjoint(g_padded, phi.rows(), phi.cols(), padding);
}

}  // namespace nfh
