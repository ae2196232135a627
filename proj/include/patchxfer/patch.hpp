#pragma once

#include <cstddef>

#include "patchxfer/tensor.hpp"

namespace patchxfer {

/// Square sliding window: `window` pixels wide, moved by `stride`, over an
/// image zero-padded by `pad` on every side.
struct PatchGeometry {
  std::size_t window = 6;
  std::size_t stride = 2;
  std::size_t pad = 2;

  /// Throws GeometryError unless window >= 1, stride >= 1 and pad < window.
  void validate() const;

  /// floor((n + 2 pad - window) / stride) + 1; throws when no window fits.
  std::size_t patches_along(std::size_t n) const;

  /// Same window, stride and padding multiplied by `factor`.
  PatchGeometry scaled(std::size_t factor) const {
    return {window * factor, stride * factor, pad * factor};
  }

  friend bool operator==(const PatchGeometry&, const PatchGeometry&) = default;
};

struct PatchCount {
  std::size_t rows = 0;  // n_h
  std::size_t cols = 0;  // n_w
  std::size_t total = 0;
};

PatchCount patch_count(std::size_t height, std::size_t width, const PatchGeometry& g);

/// Flattened windows of a (C, H, W) source, one row per window origin in
/// row-major order. Each row holds the window channel by channel, each
/// channel row by row, so rows have C * window * window elements.
struct PatchSet {
  Tensor patches;  // (N, C * k * k)
  PatchGeometry geometry;
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t count() const { return patches.dim(0); }
  std::size_t length() const { return patches.dim(1); }
  PatchCount grid() const { return patch_count(height, width, geometry); }
};

PatchSet unfold(const Tensor& t, const PatchGeometry& g);

/// Overlap-add of every window back onto the source grid, divided by the
/// number of windows covering each pixel. Pixels no window reaches are zero.
Tensor fold(const PatchSet& ps);

/// Number of windows covering each source pixel, shape (1, H, W).
Tensor coverage(std::size_t height, std::size_t width, const PatchGeometry& g);

}  // namespace patchxfer
