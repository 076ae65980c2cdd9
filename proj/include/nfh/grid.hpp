#pragma once

#include "nfh/types.hpp"

namespace nfh {

// Squared dimensionless spatial frequencies xi^2 = xi_y^2 + xi_x^2 on the
// unit-pitch sampling lattice, laid out in FFT order (zero frequency at
// (0, 0), negative frequencies in the upper half of each axis). Along an
// axis of N samples the frequencies are xi = 2*pi*k/N with integer
// k in [-floor(N/2), ceil(N/2)).
struct FrequencyGrid {
  Index ny = 0;
  Index nx = 0;
  RealImage xi2;
};

FrequencyGrid frequency_sq_grid(Index ny, Index nx);

}  // namespace nfh
