#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nfh/ctf.hpp"
#include "nfh/forward.hpp"
#include "nfh/pad.hpp"
#include "nfh/types.hpp"

namespace nfh {

// Projected-thickness sphere phantom. Coordinates and radii are in pixels;
// the phase of each sphere is -prefactor * 2 * sqrt(R^2 - r^2), spheres add
// where they overlap, and the phase is exactly zero outside every disk.
struct Sphere {
  double center_y = 0.0;
  double center_x = 0.0;
  double radius = 0.0;
};

struct SpherePhantomSpec {
  std::vector<Sphere> spheres;
  // Physical parameterization: prefactor = wavenumber * delta, with the
  // wavenumber in 1/pixel units (2*pi*dx/lambda) and delta the refractive
  // index decrement.
  double wavenumber = 0.0;
  double delta = 0.0;
  // Alternative: pin the phase at the center of the largest sphere
  // (overlaps ignored); must be <= 0.
  std::optional<double> peak_phase;
  // Average 2x2 subpixel samples per pixel to soften the disk edges.
  bool supersample = false;
};

RealImage sphere_phantom(const SpherePhantomSpec& spec, Index ny, Index nx);

// Measurement noise. Poisson counting noise at photon_count expected
// photons per pixel (renormalized back to unit background), additive
// Gaussian readout noise, and a smooth multiplicative flat-field drift.
// A stage is disabled when its parameter is 0.
struct NoiseSpec {
  double photon_count = 0.0;
  double gaussian_sigma = 0.0;
  double drift_amplitude = 0.0;       // in [0, 0.5)
  double drift_correlation_length = 8.0;  // pixels, >= 1
  std::uint64_t seed = 0;
};

// Smooth multiplicative field with mean 1 and maximum deviation exactly
// equal to amplitude; spectral content above 2*pi/correlation_length is
// suppressed by at least 40 dB in power.
RealImage flat_field_drift(Index ny, Index nx, double amplitude, double correlation_length,
                           std::uint64_t seed);

// Simulates holograms of a phase map through the full nonlinear model and
// applies the noise stages (drift, then Poisson, then Gaussian). Intensities
// are clamped at 0 so the output is a valid hologram set.
HologramSet simulate_holograms(const RealImage& phi, const MaterialCoupling& coupling,
                               const std::vector<double>& fresnel_numbers, const NoiseSpec& noise,
                               const Padding& padding = {});

}  // namespace nfh
