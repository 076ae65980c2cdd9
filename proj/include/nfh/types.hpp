#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>

namespace nfh {

using Complex = std::complex<double>;
using Index = Eigen::Index;

// 2-D real-valued grid: phase maps (radians) and intensities (dimensionless).
using RealImage = Eigen::ArrayXXd;

// 2-D complex wave field on the same grid.
using ComplexField = Eigen::ArrayXXcd;

// Binary-valued grid used for support masks (0 outside, 1 inside).
using MaskImage = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

inline double l2_norm(const RealImage& a) { return std::sqrt(a.square().sum()); }
inline double l2_norm(const ComplexField& a) { return std::sqrt(a.abs2().sum()); }

inline double inner(const RealImage& a, const RealImage& b) { return (a * b).sum(); }
inline Complex inner(const ComplexField& a, const ComplexField& b) {
  return (a.conjugate() * b).sum();
}

// Relative L2 distance between phase maps modulo a global offset. Holograms
// are invariant under phi -> phi + const for pure phase objects (a unimodular
// factor drops out of the intensity), so the offset is not an observable and
// reconstructions are compared on offset-free representatives.
inline double relative_error(const RealImage& phi, const RealImage& reference) {
  const RealImage diff = phi - reference;
  const double denom = std::sqrt((reference - reference.mean()).square().sum());
  const double dist = std::sqrt((diff - diff.mean()).square().sum());
  return denom > 0.0 ? dist / denom : dist;
}

inline bool all_finite(const RealImage& a) { return a.isFinite().all(); }
inline bool all_finite(const ComplexField& a) {
  return a.real().isFinite().all() && a.imag().isFinite().all();
}

inline ComplexField to_complex(const RealImage& a) { return a.cast<Complex>(); }

}  // namespace nfh
