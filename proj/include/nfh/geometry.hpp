#pragma once

namespace nfh {

// Cone-beam holography setup: source to sample distance z01, source to
// detector distance z02, physical detector pixel pitch, photon energy.
struct SetupGeometry {
  double z01_m = 0.0;
  double z02_m = 0.0;
  double pixel_pitch_m = 0.0;
  double energy_kev = 0.0;
};

// Equivalent parallel-beam parameters after magnification rescaling.
struct EffectiveParameters {
  double magnification = 0.0;
  double effective_pixel_m = 0.0;
  double effective_distance_m = 0.0;
  double wavelength_m = 0.0;
  double fresnel_number = 0.0;  // per effective pixel
};

EffectiveParameters effective_parameters(const SetupGeometry& setup);

}  // namespace nfh
