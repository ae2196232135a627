#pragma once

#include <array>

#include "patchxfer/tensor.hpp"

namespace patchxfer {

struct SobelKernels {
  using Kernel = std::array<std::array<int, 3>, 3>;
  static constexpr Kernel kx{{{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}}};
  static constexpr Kernel ky{{{1, 2, 1}, {0, 0, 0}, {-1, -2, -1}}};
};

/// Per-channel sqrt((Kx * I)^2 + (Ky * I)^2). Borders replicate the edge
/// pixel, so any constant image maps to exactly zero.
Tensor gradient_density(const Tensor& img);

/// Raw per-channel Sobel responses (Kx * I, Ky * I) with the same border rule.
std::array<Tensor, 2> sobel_responses(const Tensor& img);

}  // namespace patchxfer
