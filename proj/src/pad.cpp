#include "nfh/pad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfh {

namespace {

void check_factor(double factor) {
  if (!(factor >= 1.0) || !std::isfinite(factor))
    throw std::invalid_argument("pad_image: factor must be finite and >= 1");
}

Index clamp_index(Index i, Index n) { return std::min(std::max(i, Index{0}), n - 1); }

}  // namespace

Index padded_extent(Index n, double factor) {
  check_factor(factor);
  return std::max(n, static_cast<Index>(std::llround(static_cast<double>(n) * factor)));
}

RealImage pad_image(const RealImage& img, const Padding& padding) {
  check_factor(padding.factor);
  const Index ny = img.rows(), nx = img.cols();
  const Index pny = padded_extent(ny, padding.factor), pnx = padded_extent(nx, padding.factor);
  if (pny == ny && pnx == nx) return img;
  const Index oy = (pny - ny) / 2, ox = (pnx - nx) / 2;
  RealImage out(pny, pnx);
  if (padding.mode == PadMode::Constant) {
    out.setConstant(padding.constant_value);
    out.block(oy, ox, ny, nx) = img;
    return out;
  }
  for (Index px = 0; px < pnx; ++px) {
    const Index sx = clamp_index(px - ox, nx);
    for (Index py = 0; py < pny; ++py) out(py, px) = img(clamp_index(py - oy, ny), sx);
  }
  return out;
}

RealImage crop_image(const RealImage& img, Index ny, Index nx) {
  if (ny < 1 || nx < 1 || img.rows() < ny || img.cols() < nx)
    throw std::invalid_argument("crop_image: target shape exceeds image");
  if (img.rows() == ny && img.cols() == nx) return img;
  const Index oy = (img.rows() - ny) / 2, ox = (img.cols() - nx) / 2;
  return img.block(oy, ox, ny, nx);
}

RealImage zero_embed(const RealImage& img, Index padded_ny, Index padded_nx) {
  if (padded_ny < img.rows() || padded_nx < img.cols())
    throw std::invalid_argument("zero_embed: padded shape smaller than image");
  if (padded_ny == img.rows() && padded_nx == img.cols()) return img;
  RealImage out = RealImage::Zero(padded_ny, padded_nx);
  out.block((padded_ny - img.rows()) / 2, (padded_nx - img.cols()) / 2, img.rows(), img.cols()) = img;
  return out;
}

RealImage pad_linear(const RealImage& img, const Padding& padding) {
  if (padding.mode == PadMode::Replicate) return pad_image(img, padding);
  return zero_embed(img, padded_extent(img.rows(), padding.factor),
                    padded_extent(img.cols(), padding.factor));
}

RealImage pad_linear_adjoint(const RealImage& padded, Index ny, Index nx, const Padding& padding) {
  const Index pny = padded_extent(ny, padding.factor), pnx = padded_extent(nx, padding.factor);
  if (padded.rows() != pny || padded.cols() != pnx)
    throw std::invalid_argument("pad_linear_adjoint: padded shape inconsistent with target");
  if (pny == ny && pnx == nx) return padded;
  if (padding.mode == PadMode::Constant) return crop_image(padded, ny, nx);
  const Index oy = (pny - ny) / 2, ox = (pnx - nx) / 2;
  RealImage out = RealImage::Zero(ny, nx);
  for (Index px = 0; px < pnx; ++px) {
    const Index sx = clamp_index(px - ox, nx);
    for (Index py = 0; py < pny; ++py) out(clamp_index(py - oy, ny), sx) += padded(py, px);
  }
  return out;
}

}  // namespace nfh
