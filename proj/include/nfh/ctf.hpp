#pragma once

#include <vector>

#include "nfh/constraints.hpp"
#include "nfh/forward.hpp"
#include "nfh/pad.hpp"
#include "nfh/regularization.hpp"
#include "nfh/trace.hpp"
#include "nfh/types.hpp"

namespace nfh {

// Measured holograms (flat-field corrected, unit background) with their
// Fresnel numbers, all on a common detector grid.
struct HologramSet {
  std::vector<RealImage> holograms;
  std::vector<double> fresnel_numbers;

  Index ny() const { return holograms.empty() ? 0 : holograms.front().rows(); }
  Index nx() const { return holograms.empty() ? 0 : holograms.front().cols(); }
  int count() const { return static_cast<int>(holograms.size()); }
};

void validate_hologram_set(const HologramSet& data);

// Quadratic functional behind the closed-form solver:
//   sum_j || linear_model_j(phi) - I_j ||^2 + || alpha^(1/2) F(phi) ||^2.
double tikhonov_lin_value(const RealImage& phi, const HologramSet& data,
                          const MaterialCoupling& coupling, const RegularizationWeights& weights,
                          const Padding& padding = {});

// Closed-form minimizer of tikhonov_lin_value: a single Fourier-domain
// quotient over all holograms. Exact on the unpadded torus because the
// transfer factors are even and the data spectra Hermitian, which keeps the
// quotient Hermitian and the output real.
RealImage ctf_reconstruct(const HologramSet& data, const MaterialCoupling& coupling,
                          const RegularizationWeights& weights, const Padding& padding = {});

// Which vector the rho-proximal term of the phi-update anchors to. Direct
// anchors at the running multiplier itself; ScaledDual uses the classical
// splitting anchor (feasible iterate minus multiplier).
enum class AdmmVariant { Direct, ScaledDual };

struct CctfOptions {
  double rho = 0.1;
  double tolerance = 1e-3;   // applied to both relative residuals
  int max_iterations = 200;
  bool accelerate = true;    // Nesterov momentum on the splitting variables
  AdmmVariant variant = AdmmVariant::Direct;
};

struct CctfResult {
  RealImage phi;  // the feasible iterate, an element of the constraint set
  ConvergenceTrace trace;
};

// Constrained CTF: splitting between the quadratic functional (closed-form
// filter update) and the projection onto the constraint set, with optional
// restarted momentum. Per iteration: exactly one forward and one inverse
// transform beyond precomputation.
CctfResult cctf_reconstruct(const HologramSet& data, const MaterialCoupling& coupling,
                            const RegularizationWeights& weights, const ConstraintSet& constraints,
                            const CctfOptions& options = {}, const Padding& padding = {});

}  // namespace nfh
