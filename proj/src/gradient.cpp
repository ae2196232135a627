#include "patchxfer/gradient.hpp"

#include <algorithm>
#include <cmath>

namespace patchxfer {

namespace {

template <typename Fn>
void sobel_each(const Tensor& img, Fn&& emit) {
  require_image(img, "gradient_density");
  const auto H = static_cast<std::ptrdiff_t>(img.height());
  const auto W = static_cast<std::ptrdiff_t>(img.width());
  for (std::size_t c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    auto px = [&](std::ptrdiff_t y, std::ptrdiff_t x) -> double {
      y = std::clamp<std::ptrdiff_t>(y, 0, H - 1);
      x = std::clamp<std::ptrdiff_t>(x, 0, W - 1);
      return src[static_cast<std::size_t>(y * W + x)];
    };
    for (std::ptrdiff_t y = 0; y < H; ++y)
      for (std::ptrdiff_t x = 0; x < W; ++x) {
        double gx = 0.0, gy = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const double v = px(y + dy, x + dx);
            gx += SobelKernels::kx[dy + 1][dx + 1] * v;
            gy += SobelKernels::ky[dy + 1][dx + 1] * v;
          }
        emit(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x), gx, gy);
      }
  }
}

}  // namespace

Tensor gradient_density(const Tensor& img) {
  Tensor out(img.shape());
  sobel_each(img, [&](std::size_t c, std::size_t y, std::size_t x, double gx, double gy) {
    out.at(c, y, x) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
  });
  return out;
}

std::array<Tensor, 2> sobel_responses(const Tensor& img) {
  std::array<Tensor, 2> out{Tensor(img.shape()), Tensor(img.shape())};
  sobel_each(img, [&](std::size_t c, std::size_t y, std::size_t x, double gx, double gy) {
    out[0].at(c, y, x) = static_cast<float>(gx);
    out[1].at(c, y, x) = static_cast<float>(gy);
  });
  return out;
}

}  // namespace patchxfer
