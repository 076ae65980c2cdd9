#include "nfh/regularization.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nfh {

namespace {

double mean_fresnel(const std::vector<double>& fresnel_numbers) {
  if (fresnel_numbers.empty())
    throw std::invalid_argument("regularization: at least one Fresnel number required");
  for (double f : fresnel_numbers)
    if (!(f > 0.0) || !std::isfinite(f))
      throw std::invalid_argument("regularization: Fresnel numbers must be positive and finite");
  return std::accumulate(fresnel_numbers.begin(), fresnel_numbers.end(), 0.0) /
         static_cast<double>(fresnel_numbers.size());
}

void check_levels(double alpha_low, double alpha_high, double width) {
  if (!(alpha_low >= 0.0) || !(alpha_high >= 0.0) || !std::isfinite(alpha_low) ||
      !std::isfinite(alpha_high))
    throw std::invalid_argument("regularization: alpha levels must be finite and >= 0");
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("regularization: transition width must be positive");
}

RealImage logistic_step(const RealImage& radius, double cutoff, double width) {
  // 1 / (1 + exp(-(|xi| - cutoff) / (width * cutoff)))
  const double scale = 1.0 / (width * cutoff);
  return radius.unaryExpr(
      [cutoff, scale](double r) { return 1.0 / (1.0 + std::exp(-(r - cutoff) * scale)); });
}

}  // namespace

RegularizationWeights build_weights_two_level(const FrequencyGrid& grid,
                                              const std::vector<double>& fresnel_numbers,
                                              double alpha_low, double alpha_high,
                                              double transition_width) {
  check_levels(alpha_low, alpha_high, transition_width);
  const double fbar = mean_fresnel(fresnel_numbers);
  RegularizationWeights w;
  w.alpha_low = alpha_low;
  w.alpha_high = alpha_high;
  w.transition_width = transition_width;
  w.cutoff1 = std::numbers::pi * std::sqrt(2.0 * fbar);
  const RealImage radius = grid.xi2.sqrt();
  w.alpha = alpha_low + (alpha_high - alpha_low) * logistic_step(radius, w.cutoff1, transition_width);
  return w;
}

RegularizationWeights build_weights_three_level(const FrequencyGrid& grid,
                                                const std::vector<double>& fresnel_numbers,
                                                double detector_aspect, double alpha_low,
                                                double alpha_high, double alpha_beyond_na,
                                                double transition_width) {
  if (!(detector_aspect >= 2.0) || !std::isfinite(detector_aspect))
    throw std::invalid_argument("regularization: detector aspect must be finite and >= 2");
  if (!(alpha_beyond_na >= 0.0) || !std::isfinite(alpha_beyond_na))
    throw std::invalid_argument("regularization: alpha_beyond_na must be finite and >= 0");
  RegularizationWeights w =
      build_weights_two_level(grid, fresnel_numbers, alpha_low, alpha_high, transition_width);
  w.alpha_beyond_na = alpha_beyond_na;
  const double fbar = mean_fresnel(fresnel_numbers);
  w.cutoff2 = std::numbers::pi * detector_aspect * fbar;
  // Aperture at or past the Nyquist band: the third plateau never engages.
  if (w.cutoff2 >= std::numbers::pi) return w;
  const RealImage radius = grid.xi2.sqrt();
  w.alpha += (alpha_beyond_na - alpha_high) * logistic_step(radius, w.cutoff2, transition_width);
  return w;
}

}  // namespace nfh
