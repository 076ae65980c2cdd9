#include "nfh/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>

namespace nfh {

namespace {

std::atomic<std::uint64_t> g_forward_count{0};
std::atomic<std::uint64_t> g_inverse_count{0};

// Plans are cached per (ny, nx, sign) and executed through the new-array
// interface, which is the thread-safe part of FFTW. FFTW_ESTIMATE keeps
// planning deterministic and cheap; FFTW_UNALIGNED lets the plan run on
// whatever buffers Eigen hands us. The planner itself is not reentrant and
// must not run concurrently with executions either, hence the
// reader-writer lock: executions share, planning excludes.
std::shared_mutex g_plan_mutex;
std::map<std::tuple<Index, Index, int>, fftw_plan> g_plans;

fftw_plan plan_for(Index ny, Index nx, int sign, fftw_complex* in, fftw_complex* out) {
  const auto key = std::make_tuple(ny, nx, sign);
  {
    std::shared_lock lock(g_plan_mutex);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
  }
  std::unique_lock lock(g_plan_mutex);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second;
  // Eigen arrays are column-major, so a (ny, nx) field is a row-major
  // (nx, ny) array from FFTW's point of view. The 2-D transform is
  // separable, so only the axis order swaps.
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), in, out, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("fft2: fftw planner failed");
  g_plans.emplace(key, plan);
  return plan;
}

ComplexField transform(const ComplexField& in, int sign) {
  if (in.rows() < 1 || in.cols() < 1) throw std::invalid_argument("fft2: empty input");
  ComplexField out(in.rows(), in.cols());
  auto* ip = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
  auto* op = reinterpret_cast<fftw_complex*>(out.data());
  const fftw_plan plan = plan_for(in.rows(), in.cols(), sign, ip, op);
  {
    std::shared_lock lock(g_plan_mutex);
    fftw_execute_dft(plan, ip, op);
  }
  out *= 1.0 / std::sqrt(static_cast<double>(in.rows()) * static_cast<double>(in.cols()));
  return out;
}

}  // namespace

ComplexField fft2(const ComplexField& in) {
  g_forward_count.fetch_add(1, std::memory_order_relaxed);
  return transform(in, FFTW_FORWARD);
}

ComplexField ifft2(const ComplexField& in) {
  g_inverse_count.fetch_add(1, std::memory_order_relaxed);
  return transform(in, FFTW_BACKWARD);
}

FftCounters fft_counters() {
  return {g_forward_count.load(std::memory_order_relaxed),
          g_inverse_count.load(std::memory_order_relaxed)};
}

void reset_fft_counters() {
  g_forward_count.store(0, std::memory_order_relaxed);
  g_inverse_count.store(0, std::memory_order_relaxed);
}

}  // namespace nfh
