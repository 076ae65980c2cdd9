#include "nfh/propagate.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nfh/fft.hpp"

namespace nfh {

namespace {

std::atomic<std::uint64_t> g_forward{0};
std::atomic<std::uint64_t> g_backward{0};

void check_input(const ComplexField& psi, const FresnelKernel& kernel) {
  if (psi.rows() != kernel.factors.rows() || psi.cols() != kernel.factors.cols())
    throw std::invalid_argument("fresnel_propagate: field/kernel shape mismatch");
  if (!all_finite(psi)) throw std::invalid_argument("fresnel_propagate: non-finite field values");
}

}  // namespace

FresnelKernel fresnel_kernel(double fresnel_number, const FrequencyGrid& grid) {
  if (!(fresnel_number > 0.0) || !std::isfinite(fresnel_number))
    throw std::invalid_argument("fresnel_kernel: Fresnel number must be positive and finite");
  FresnelKernel kernel;
  kernel.fresnel_number = fresnel_number;
  const RealImage chirp = -grid.xi2 / (4.0 * std::numbers::pi * fresnel_number);
  kernel.factors = chirp.unaryExpr([](double a) { return Complex(std::cos(a), std::sin(a)); });
  return kernel;
}

ComplexField fresnel_propagate(const ComplexField& psi, const FresnelKernel& kernel) {
  check_input(psi, kernel);
  g_forward.fetch_add(1, std::memory_order_relaxed);
  return ifft2(ComplexField(fft2(psi) * kernel.factors));
}

ComplexField fresnel_backpropagate(const ComplexField& psi, const FresnelKernel& kernel) {
  check_input(psi, kernel);
  g_backward.fetch_add(1, std::memory_order_relaxed);
  return ifft2(ComplexField(fft2(psi) * kernel.factors.conjugate()));
}

ComplexField fresnel_propagate(const ComplexField& psi, double fresnel_number) {
  return fresnel_propagate(psi, fresnel_kernel(fresnel_number, frequency_sq_grid(psi.rows(), psi.cols())));
}

ComplexField fresnel_backpropagate(const ComplexField& psi, double fresnel_number) {
  return fresnel_backpropagate(psi, fresnel_kernel(fresnel_number, frequency_sq_grid(psi.rows(), psi.cols())));
}

PropagationCounters propagation_counters() {
  return {g_forward.load(std::memory_order_relaxed), g_backward.load(std::memory_order_relaxed)};
}

void reset_propagation_counters() {
  g_forward.store(0, std::memory_order_relaxed);
  g_backward.store(0, std::memory_order_relaxed);
}

}  // namespace nfh
