#pragma once

#include <vector>

#include "nfh/grid.hpp"
#include "nfh/types.hpp"

namespace nfh {

// Frequency-dependent Tikhonov weights alpha(xi) >= 0 stored on the same
// grid the solvers transform on, together with the parameters they were
// built from.
struct RegularizationWeights {
  RealImage alpha;
  double alpha_low = 0.0;
  double alpha_high = 0.0;
  double alpha_beyond_na = 0.0;
  double cutoff1 = 0.0;       // first CTF maximum of the mean Fresnel number
  double cutoff2 = 0.0;       // numerical aperture limit, 0 when two-level
  double transition_width = 0.0;
};

// Two plateaus blended by a logistic profile of |xi| centered on
// cutoff1 = pi * sqrt(2 * mean(F)), with transition width given as a
// fraction of the cutoff. alpha_low acts below the first CTF maximum
// (low frequencies, where the data constrain phi weakly), alpha_high above.
RegularizationWeights build_weights_two_level(const FrequencyGrid& grid,
                                              const std::vector<double>& fresnel_numbers,
                                              double alpha_low, double alpha_high,
                                              double transition_width = 0.1);

// Adds a third plateau alpha_beyond_na past the aperture cutoff
// cutoff2 = pi * detector_aspect * mean(F), where detector_aspect is the
// larger detector dimension in pixels. When cutoff2 >= pi the aperture lies
// beyond the sampling band and the result equals the two-level weights
// exactly.
RegularizationWeights build_weights_three_level(const FrequencyGrid& grid,
                                                const std::vector<double>& fresnel_numbers,
                                                double detector_aspect, double alpha_low,
                                                double alpha_high, double alpha_beyond_na,
                                                double transition_width = 0.1);

}  // namespace nfh
