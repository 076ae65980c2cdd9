#pragma once

#include "nfh/types.hpp"

namespace nfh {

// Edge handling applied before any Fourier-multiplier operation. Replicate
// extends edge values outward (no intensity jump at the frame), Constant
// fills the margin with a fixed value.
enum class PadMode { Replicate, Constant };

struct Padding {
  double factor = 2.0;  // >= 1; linear size multiplier, 1 disables padding
  PadMode mode = PadMode::Replicate;
  double constant_value = 0.0;
  bool enabled() const { return factor > 1.0; }
};

Index padded_extent(Index n, double factor);

// Centered embedding into the padded frame; margins follow the pad mode.
RealImage pad_image(const RealImage& img, const Padding& padding);

// Centered crop back to (ny, nx); inverse of pad_image on the interior.
RealImage crop_image(const RealImage& img, Index ny, Index nx);

// Centered embedding with zero margins, the adjoint of crop_image.
RealImage zero_embed(const RealImage& img, Index padded_ny, Index padded_nx);

// Linear part of pad_image: equal to pad_image for Replicate (the map is
// linear), and to zero_embed for Constant (the margin is an affine offset).
RealImage pad_linear(const RealImage& img, const Padding& padding);

// Adjoint of pad_linear. For Replicate this folds every padded sample back
// onto the edge pixel it was copied from; for Constant it is a plain crop.
RealImage pad_linear_adjoint(const RealImage& padded, Index ny, Index nx, const Padding& padding);

}  // namespace nfh
