#include "patchxfer/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "patchxfer/error.hpp"
#include "patchxfer/parallel.hpp"

namespace patchxfer {

namespace {

constexpr double kCubicA = -0.5;

struct Taps {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

std::vector<Taps> cubic_taps(std::size_t in, std::size_t out) {
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  std::vector<Taps> taps(out);
  for (std::size_t o = 0; o < out; ++o) {
    const double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
    const double base = std::floor(src);
    const double t = src - base;
    for (int k = 0; k < 4; ++k) {
      const auto i = static_cast<std::ptrdiff_t>(base) - 1 + k;
      taps[o].index[k] = static_cast<std::size_t>(
          std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(in) - 1));
      taps[o].weight[k] = cubic_weight(t + 1.0 - k);
    }
  }
  return taps;
}

struct LinearTaps {
  std::size_t lo, hi;
  double w_hi;
};

std::vector<LinearTaps> linear_taps(std::size_t in, std::size_t out) {
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  std::vector<LinearTaps> taps(out);
  for (std::size_t o = 0; o < out; ++o) {
    const double src = std::clamp((static_cast<double>(o) + 0.5) * scale - 0.5, 0.0,
                                  static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    taps[o] = {lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
  }
  return taps;
}

void check_target(std::size_t h, std::size_t w) {
  if (h == 0 || w == 0) throw ShapeError("resize: output dimension is zero");
}

}  // namespace

std::size_t ScaleSpec::apply(std::size_t n) const {
  if (numerator == 0 || denominator == 0) throw ParameterError("scale factor must be positive");
  return (2 * n * numerator + denominator) / (2 * denominator);
}

double cubic_weight(double x) {
  x = std::abs(x);
  if (x <= 1.0) return ((kCubicA + 2.0) * x - (kCubicA + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((kCubicA * x - 5.0 * kCubicA) * x + 8.0 * kCubicA) * x - 4.0 * kCubicA;
  return 0.0;
}

Tensor bicubic_resize(const Tensor& t, ScaleSpec spec) {
  require_image(t, "bicubic_resize");
  return bicubic_resize_to(t, spec.apply(t.height()), spec.apply(t.width()));
}

Tensor bicubic_resize_to(const Tensor& t, std::size_t height, std::size_t width) {
  require_image(t, "bicubic_resize");
  check_target(height, width);
  const std::size_t C = t.channels(), H = t.height(), W = t.width();
  if (height == H && width == W) return t;

  const auto xt = cubic_taps(W, width);
  const auto yt = cubic_taps(H, height);
  Tensor out = Tensor::image(C, height, width);
  parallel_for(C, [&](std::size_t c0, std::size_t c1) {
    std::vector<float> rows(H * width);
    for (std::size_t c = c0; c < c1; ++c) {
      const auto src = t.plane(c);
      for (std::size_t y = 0; y < H; ++y)
        for (std::size_t x = 0; x < width; ++x) {
          const Taps& tp = xt[x];
          double acc = 0.0;
          for (int k = 0; k < 4; ++k) acc += tp.weight[k] * src[y * W + tp.index[k]];
          rows[y * width + x] = static_cast<float>(acc);
        }
      auto dst = out.plane(c);
      for (std::size_t y = 0; y < height; ++y) {
        const Taps& tp = yt[y];
        for (std::size_t x = 0; x < width; ++x) {
          double acc = 0.0;
          for (int k = 0; k < 4; ++k) acc += tp.weight[k] * rows[tp.index[k] * width + x];
          dst[y * width + x] = static_cast<float>(acc);
        }
      }
    }
  });
  return out;
}

Tensor bilinear_resize_to(const Tensor& t, std::size_t height, std::size_t width) {
  require_image(t, "bilinear_resize");
  check_target(height, width);
  const std::size_t C = t.channels(), W = t.width();
  if (height == t.height() && width == W) return t;
  const auto xt = linear_taps(W, width);
  const auto yt = linear_taps(t.height(), height);
  Tensor out = Tensor::image(C, height, width);
  for (std::size_t c = 0; c < C; ++c) {
    const auto src = t.plane(c);
    auto dst = out.plane(c);
    for (std::size_t y = 0; y < height; ++y) {
      const auto& ty = yt[y];
      for (std::size_t x = 0; x < width; ++x) {
        const auto& tx = xt[x];
        const double top = (1.0 - tx.w_hi) * src[ty.lo * W + tx.lo] + tx.w_hi * src[ty.lo * W + tx.hi];
        const double bot = (1.0 - tx.w_hi) * src[ty.hi * W + tx.lo] + tx.w_hi * src[ty.hi * W + tx.hi];
        dst[y * width + x] = static_cast<float>((1.0 - ty.w_hi) * top + ty.w_hi * bot);
      }
    }
  }
  return out;
}

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

Tensor down_up(const Tensor& t, std::size_t factor) {
  require_image(t, "down_up");
  if (factor == 0) throw ParameterError("down_up: factor must be positive");
  if (factor == 1) return t;
  const std::size_t C = t.channels(), H = t.height(), W = t.width();
  const std::size_t Hp = (H + factor - 1) / factor * factor;
  const std::size_t Wp = (W + factor - 1) / factor * factor;

  Tensor padded = t;
  if (Hp != H || Wp != W) {
    padded = Tensor::image(C, Hp, Wp);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t y = 0; y < Hp; ++y)
        for (std::size_t x = 0; x < Wp; ++x)
          padded.at(c, y, x) = t.at(c, reflect_index(static_cast<std::ptrdiff_t>(y), H),
                                    reflect_index(static_cast<std::ptrdiff_t>(x), W));
  }
  const Tensor small = bicubic_resize_to(padded, Hp / factor, Wp / factor);
  const Tensor restored = bicubic_resize_to(small, Hp, Wp);
  if (Hp == H && Wp == W) return restored;

  Tensor out = Tensor::image(C, H, W);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t y = 0; y < H; ++y)
      for (std::size_t x = 0; x < W; ++x) out.at(c, y, x) = restored.at(c, y, x);
  return out;
}

}  // namespace patchxfer
