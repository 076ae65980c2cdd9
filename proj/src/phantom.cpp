#include "nfh/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nfh/fft.hpp"
#include "nfh/grid.hpp"
#include "nfh/rng.hpp"

namespace nfh {

namespace {

// RNG stream tags, one per noise stage.
constexpr std::uint64_t kTagDrift = 1;
constexpr std::uint64_t kTagPoisson = 2;
constexpr std::uint64_t kTagGauss = 3;

double projected_thickness(const SpherePhantomSpec& spec, double y, double x) {
  double t = 0.0;
  for (const Sphere& s : spec.spheres) {
    const double dy = y - s.center_y;
    const double dx = x - s.center_x;
    const double d2 = s.radius * s.radius - dy * dy - dx * dx;
    if (d2 > 0.0) t += 2.0 * std::sqrt(d2);
  }
  return t;
}

void check_noise(const NoiseSpec& noise) {
  if (!(noise.photon_count >= 0.0) || !std::isfinite(noise.photon_count))
    throw std::invalid_argument("noise: photon count must be finite and >= 0");
  if (!(noise.gaussian_sigma >= 0.0) || !std::isfinite(noise.gaussian_sigma))
    throw std::invalid_argument("noise: gaussian sigma must be finite and >= 0");
  if (!(noise.drift_amplitude >= 0.0) || noise.drift_amplitude >= 0.5)
    throw std::invalid_argument("noise: drift amplitude must lie in [0, 0.5)");
  if (!(noise.drift_correlation_length >= 1.0) || !std::isfinite(noise.drift_correlation_length))
    throw std::invalid_argument("noise: drift correlation length must be >= 1 pixel");
}

}  // namespace

RealImage sphere_phantom(const SpherePhantomSpec& spec, Index ny, Index nx) {
  if (ny < 1 || nx < 1) throw std::invalid_argument("sphere_phantom: shape must be positive");
  if (spec.spheres.empty()) throw std::invalid_argument("sphere_phantom: no spheres given");
  double max_radius = 0.0;
  for (const Sphere& s : spec.spheres) {
    if (!(s.radius > 0.0) || !std::isfinite(s.radius))
      throw std::invalid_argument("sphere_phantom: radii must be positive and finite");
    if (s.center_y + s.radius < -0.5 || s.center_y - s.radius > static_cast<double>(ny) - 0.5 ||
        s.center_x + s.radius < -0.5 || s.center_x - s.radius > static_cast<double>(nx) - 0.5)
      throw std::invalid_argument("sphere_phantom: sphere lies fully outside the grid");
    max_radius = std::max(max_radius, s.radius);
  }
  double prefactor;
  if (spec.peak_phase) {
    if (!(*spec.peak_phase <= 0.0) || !std::isfinite(*spec.peak_phase))
      throw std::invalid_argument("sphere_phantom: peak phase must be finite and <= 0");
    prefactor = -*spec.peak_phase / (2.0 * max_radius);
  } else {
    if (!(spec.wavenumber > 0.0) || !(spec.delta > 0.0))
      throw std::invalid_argument(
          "sphere_phantom: either peak_phase or positive wavenumber and delta required");
    prefactor = spec.wavenumber * spec.delta;
  }

  RealImage phi(ny, nx);
  for (Index ix = 0; ix < nx; ++ix) {
    const double x = static_cast<double>(ix);
    for (Index iy = 0; iy < ny; ++iy) {
      const double y = static_cast<double>(iy);
      double t;
      if (spec.supersample) {
        t = 0.25 * (projected_thickness(spec, y - 0.25, x - 0.25) +
                    projected_thickness(spec, y - 0.25, x + 0.25) +
                    projected_thickness(spec, y + 0.25, x - 0.25) +
                    projected_thickness(spec, y + 0.25, x + 0.25));
      } else {
        t = projected_thickness(spec, y, x);
      }
      phi(iy, ix) = -prefactor * t;
    }
  }
  return phi;
}

RealImage flat_field_drift(Index ny, Index nx, double amplitude, double correlation_length,
                           std::uint64_t seed) {
  if (!(amplitude >= 0.0) || amplitude >= 0.5)
    throw std::invalid_argument("flat_field_drift: amplitude must lie in [0, 0.5)");
  if (!(correlation_length >= 1.0))
    throw std::invalid_argument("flat_field_drift: correlation length must be >= 1 pixel");
  if (amplitude == 0.0) return RealImage::Ones(ny, nx);

  RealImage white(ny, nx);
  CounterRng rng(derive_stream(seed, kTagDrift));
  for (Index iy = 0; iy < ny; ++iy)
    for (Index ix = 0; ix < nx; ++ix) white(iy, ix) = rng.gaussian();

  // Gaussian low-pass with -60 dB power at the cutoff frequency, which
  // leaves comfortable margin on a 40 dB suppression requirement.
  const double cutoff = 2.0 * std::numbers::pi / correlation_length;
  const FrequencyGrid grid = frequency_sq_grid(ny, nx);
  const RealImage gain = (-std::log(1000.0) * grid.xi2 / (cutoff * cutoff)).exp();
  RealImage drift = ifft2(ComplexField(fft2(to_complex(white)) * gain)).real();
  drift -= drift.mean();
  const double peak = drift.abs().maxCoeff();
  if (peak > 0.0) drift *= amplitude / peak;
  return 1.0 + drift;
}

HologramSet simulate_holograms(const RealImage& phi, const MaterialCoupling& coupling,
                               const std::vector<double>& fresnel_numbers, const NoiseSpec& noise,
                               const Padding& padding) {
  if (fresnel_numbers.empty())
    throw std::invalid_argument("simulate_holograms: at least one Fresnel number required");
  check_noise(noise);
  HologramSet out;
  out.fresnel_numbers = fresnel_numbers;
  out.holograms.reserve(fresnel_numbers.size());
  const Index ny = phi.rows(), nx = phi.cols();
  for (std::size_t j = 0; j < fresnel_numbers.size(); ++j) {
    RealImage intensity = nonlinear_model(phi, coupling, fresnel_numbers[j], padding);
    if (noise.drift_amplitude > 0.0)
      intensity *= flat_field_drift(ny, nx, noise.drift_amplitude, noise.drift_correlation_length,
                                    derive_stream(noise.seed, kTagDrift, j + 1));
    if (noise.photon_count > 0.0) {
      for (Index iy = 0; iy < ny; ++iy) {
        for (Index ix = 0; ix < nx; ++ix) {
          const std::uint64_t pixel =
              static_cast<std::uint64_t>(iy) * static_cast<std::uint64_t>(nx) +
              static_cast<std::uint64_t>(ix);
          CounterRng rng(derive_stream(noise.seed, kTagPoisson, j + 1, pixel));
          intensity(iy, ix) = static_cast<double>(rng.poisson(intensity(iy, ix) * noise.photon_count)) /
                              noise.photon_count;
        }
      }
    }
    if (noise.gaussian_sigma > 0.0) {
      for (Index iy = 0; iy < ny; ++iy) {
        for (Index ix = 0; ix < nx; ++ix) {
          const std::uint64_t pixel =
              static_cast<std::uint64_t>(iy) * static_cast<std::uint64_t>(nx) +
              static_cast<std::uint64_t>(ix);
          CounterRng rng(derive_stream(noise.seed, kTagGauss, j + 1, pixel));
          intensity(iy, ix) += noise.gaussian_sigma * rng.gaussian();
        }
      }
    }
    // Readout noise can undershoot 0; clamp so the set stays a valid
    // nonnegative hologram set.
    out.holograms.push_back(intensity.max(0.0));
  }
  return out;
}

}  // namespace nfh
