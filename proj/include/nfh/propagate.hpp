#pragma once

#include <cstdint>

#include "nfh/grid.hpp"
#include "nfh/types.hpp"

namespace nfh {

// Fresnel propagation over a dimensionless distance set by the Fresnel
// number F = dx^2 / (lambda * z): a Fourier multiplier with the unimodular
// kernel exp(-i * xi^2 / (4*pi*F)). Backpropagation applies the conjugate
// kernel, so the pair is exactly unitary on the sampling torus.
struct FresnelKernel {
  double fresnel_number = 0.0;
  ComplexField factors;
};

FresnelKernel fresnel_kernel(double fresnel_number, const FrequencyGrid& grid);

ComplexField fresnel_propagate(const ComplexField& psi, const FresnelKernel& kernel);
ComplexField fresnel_backpropagate(const ComplexField& psi, const FresnelKernel& kernel);

// Convenience overloads that build the kernel on the fly.
ComplexField fresnel_propagate(const ComplexField& psi, double fresnel_number);
ComplexField fresnel_backpropagate(const ComplexField& psi, double fresnel_number);

// Process-wide propagation counters (forward / backward), used to assert
// per-iteration cost contracts of the solvers. Thread-safe.
struct PropagationCounters {
  std::uint64_t forward = 0;
  std::uint64_t backward = 0;
};

PropagationCounters propagation_counters();
void reset_propagation_counters();

}  // namespace nfh
