#pragma once

#include <cstdint>

#include "nfh/types.hpp"

namespace nfh {

// Unitary 2-D DFT: both directions carry a 1/sqrt(ny*nx) factor so that
// Parseval's identity holds exactly and ifft2(fft2(x)) == x up to round-off.
// Zero frequency sits at index (0, 0); no fftshift anywhere.
ComplexField fft2(const ComplexField& in);
ComplexField ifft2(const ComplexField& in);

// Process-wide transform counters, useful for asserting per-iteration cost
// contracts. Thread-safe.
struct FftCounters {
  std::uint64_t forward = 0;
  std::uint64_t inverse = 0;
};

FftCounters fft_counters();
void reset_fft_counters();

}  // namespace nfh
