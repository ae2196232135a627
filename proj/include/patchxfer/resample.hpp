#pragma once

#include <cstddef>

#include "patchxfer/tensor.hpp"

namespace patchxfer {

/// Axis-uniform rational scale factor numerator / denominator.
struct ScaleSpec {
  std::size_t numerator = 1;
  std::size_t denominator = 1;

  static ScaleSpec up(std::size_t f) { return {f, 1}; }
  static ScaleSpec down(std::size_t f) { return {1, f}; }

  bool is_identity() const { return numerator == denominator; }
  /// round(n * factor), halves rounded up.
  std::size_t apply(std::size_t n) const;
};

/// Keys cubic convolution weight, a = -0.5.
double cubic_weight(double x);

/// Bicubic resampling with half-pixel centers and clamped sample coordinates.
Tensor bicubic_resize(const Tensor& t, ScaleSpec spec);
Tensor bicubic_resize_to(const Tensor& t, std::size_t height, std::size_t width);

/// Bilinear resampling with half-pixel centers, used to spread per-patch
/// scalars over a pixel grid.
Tensor bilinear_resize_to(const Tensor& t, std::size_t height, std::size_t width);

/// Downsample by `factor` then upsample back. Shapes that are not multiples
/// of `factor` are reflect-padded at the bottom/right first and cropped back.
Tensor down_up(const Tensor& t, std::size_t factor);

/// Mirror index into [0, n) without repeating the edge sample.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n);

}  // namespace patchxfer
