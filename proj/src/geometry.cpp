#include "nfh/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace nfh {

EffectiveParameters effective_parameters(const SetupGeometry& setup) {
  if (!(setup.z01_m > 0.0) || !std::isfinite(setup.z01_m))
    throw std::invalid_argument("geometry: z01 must be positive and finite");
  if (!(setup.z02_m > setup.z01_m) || !std::isfinite(setup.z02_m))
    throw std::invalid_argument("geometry: z02 must exceed z01");
  if (!(setup.pixel_pitch_m > 0.0) || !std::isfinite(setup.pixel_pitch_m))
    throw std::invalid_argument("geometry: pixel pitch must be positive and finite");
  if (!(setup.energy_kev > 0.0) || !std::isfinite(setup.energy_kev))
    throw std::invalid_argument("geometry: energy must be positive and finite");

  EffectiveParameters out;
  out.magnification = setup.z02_m / setup.z01_m;
  out.effective_pixel_m = setup.pixel_pitch_m / out.magnification;
  out.effective_distance_m = (setup.z02_m - setup.z01_m) / out.magnification;
  // hc = 1.23984193 eV um, so lambda[m] = 1.23984193e-9 / E[keV].
  out.wavelength_m = 1.23984193e-9 / setup.energy_kev;
  out.fresnel_number = out.effective_pixel_m * out.effective_pixel_m /
                       (out.wavelength_m * out.effective_distance_m);
  return out;
}

}  // namespace nfh
