#include "nfh/grid.hpp"

#include <numbers>
#include <stdexcept>
#include <vector>

namespace nfh {

namespace {

// xi values for one axis in FFT order: k = 0, 1, ..., then the negative
// wrap-around half. The Nyquist sample of an even axis maps to k = -N/2.
std::vector<double> xi_axis(Index n) {
  std::vector<double> xi(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index k = (i <= (n - 1) / 2) ? i : i - n;
    xi[static_cast<std::size_t>(i)] =
        2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  }
  return xi;
}

}  // namespace

FrequencyGrid frequency_sq_grid(Index ny, Index nx) {
  if (ny < 1 || nx < 1) throw std::invalid_argument("frequency_sq_grid: shape must be positive");
  FrequencyGrid grid;
  grid.ny = ny;
  grid.nx = nx;
  grid.xi2.resize(ny, nx);
  const auto xy = xi_axis(ny);
  const auto xx = xi_axis(nx);
  for (Index ix = 0; ix < nx; ++ix) {
    const double wx2 = xx[static_cast<std::size_t>(ix)] * xx[static_cast<std::size_t>(ix)];
    for (Index iy = 0; iy < ny; ++iy) {
      const double wy = xy[static_cast<std::size_t>(iy)];
      grid.xi2(iy, ix) = wy * wy + wx2;
    }
  }
  return grid;
}

}  // namespace nfh
