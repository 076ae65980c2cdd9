#pragma once

#include <complex>

#include "nfh/grid.hpp"
#include "nfh/pad.hpp"
#include "nfh/types.hpp"

namespace nfh {

// Proportionality between absorption and phase for a single material:
// mu = c_beta_delta * phi, i.e. the object factor is exp(gamma * phi) with
// gamma = i - c_beta_delta. Pure phase objects have c_beta_delta = 0.
struct MaterialCoupling {
  double c_beta_delta = 0.0;

  MaterialCoupling() = default;
  explicit MaterialCoupling(double c);

  Complex gamma() const { return Complex(-c_beta_delta, 1.0); }
};

// Oscillatory transfer factors of the linearized intensity: s = sin and
// c = cos of xi^2 / (4*pi*F) on the frequency grid.
struct CtfFactors {
  double fresnel_number = 0.0;
  RealImage s;
  RealImage c;
};

CtfFactors ctf_factors(double fresnel_number, const FrequencyGrid& grid);

// Combined single-material transfer factor m = s - c_beta_delta * c.
RealImage combined_ctf(const CtfFactors& factors, const MaterialCoupling& coupling);

// Linearized (weak-object) intensity: 1 + 2*Re F^-1[ m * F(phi) ], with the
// unit background kept exactly (it never passes through a transform).
RealImage linear_model(const RealImage& phi, const MaterialCoupling& coupling,
                       double fresnel_number, const Padding& padding = {});

// Full nonlinear hologram: |D_F(exp(gamma * phi))|^2. Padding composes a
// crop back to the detector frame into the model.
RealImage nonlinear_model(const RealImage& phi, const MaterialCoupling& coupling,
                          double fresnel_number, const Padding& padding = {});

// Directional derivative of nonlinear_model at phi along direction psi.
RealImage frechet_apply(const RealImage& phi, const RealImage& direction,
                        const MaterialCoupling& coupling, double fresnel_number,
                        const Padding& padding = {});

// Adjoint of the same derivative with respect to the real L2 inner product;
// exact for the composed pad/propagate/modulus/crop chain, so
// <frechet_apply(phi, psi), I> == <psi, frechet_adjoint(phi, I)>.
RealImage frechet_adjoint(const RealImage& phi, const RealImage& intensity_direction,
                          const MaterialCoupling& coupling, double fresnel_number,
                          const Padding& padding = {});

}  // namespace nfh
