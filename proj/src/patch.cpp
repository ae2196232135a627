#include "patchxfer/patch.hpp"

#include <string>

#include "patchxfer/error.hpp"
#include "patchxfer/parallel.hpp"

namespace patchxfer {

namespace {

std::string describe(const PatchGeometry& g) {
  return "(k=" + std::to_string(g.window) + ", s=" + std::to_string(g.stride) +
         ", p=" + std::to_string(g.pad) + ")";
}

}  // namespace

void PatchGeometry::validate() const {
  if (window < 1 || stride < 1)
    throw GeometryError("window and stride must be >= 1 " + describe(*this));
  if (pad >= window) throw GeometryError("padding must be smaller than window " + describe(*this));
}

std::size_t PatchGeometry::patches_along(std::size_t n) const {
  validate();
  if (n + 2 * pad < window)
    throw GeometryError("window " + describe(*this) + " larger than padded extent " +
                        std::to_string(n + 2 * pad));
  return (n + 2 * pad - window) / stride + 1;
}

PatchCount patch_count(std::size_t height, std::size_t width, const PatchGeometry& g) {
  const std::size_t rows = g.patches_along(height);
  const std::size_t cols = g.patches_along(width);
  return {rows, cols, rows * cols};
}

PatchSet unfold(const Tensor& t, const PatchGeometry& g) {
  require_image(t, "unfold");
  const std::size_t C = t.channels(), H = t.height(), W = t.width();
  const PatchCount n = patch_count(H, W, g);
  const std::size_t k = g.window;
  const std::size_t len = C * k * k;
  PatchSet ps{Tensor(Shape{n.total, len}), g, C, H, W};
  float* out = ps.patches.raw();
  parallel_for(n.total, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto oy = static_cast<std::ptrdiff_t>((p / n.cols) * g.stride) -
                      static_cast<std::ptrdiff_t>(g.pad);
      const auto ox = static_cast<std::ptrdiff_t>((p % n.cols) * g.stride) -
                      static_cast<std::ptrdiff_t>(g.pad);
      float* row = out + p * len;
      for (std::size_t c = 0; c < C; ++c)
        for (std::size_t dy = 0; dy < k; ++dy) {
          const std::ptrdiff_t y = oy + static_cast<std::ptrdiff_t>(dy);
          for (std::size_t dx = 0; dx < k; ++dx) {
            const std::ptrdiff_t x = ox + static_cast<std::ptrdiff_t>(dx);
            const bool inside = y >= 0 && x >= 0 && y < static_cast<std::ptrdiff_t>(H) &&
                                x < static_cast<std::ptrdiff_t>(W);
            *row++ = inside ? t.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x))
                            : 0.0f;
          }
        }
    }
  });
  return ps;
}

Tensor coverage(std::size_t height, std::size_t width, const PatchGeometry& g) {
  const PatchCount n = patch_count(height, width, g);
  Tensor cov = Tensor::image(1, height, width);
  for (std::size_t p = 0; p < n.total; ++p) {
    const auto oy = static_cast<std::ptrdiff_t>((p / n.cols) * g.stride) -
                    static_cast<std::ptrdiff_t>(g.pad);
    const auto ox = static_cast<std::ptrdiff_t>((p % n.cols) * g.stride) -
                    static_cast<std::ptrdiff_t>(g.pad);
    for (std::size_t dy = 0; dy < g.window; ++dy)
      for (std::size_t dx = 0; dx < g.window; ++dx) {
        const std::ptrdiff_t y = oy + static_cast<std::ptrdiff_t>(dy);
        const std::ptrdiff_t x = ox + static_cast<std::ptrdiff_t>(dx);
        if (y >= 0 && x >= 0 && y < static_cast<std::ptrdiff_t>(height) &&
            x < static_cast<std::ptrdiff_t>(width))
          cov.at(0, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) += 1.0f;
      }
  }
  return cov;
}

Tensor fold(const PatchSet& ps) {
  const PatchGeometry& g = ps.geometry;
  const PatchCount n = patch_count(ps.height, ps.width, g);
  const std::size_t k = g.window;
  if (ps.patches.rank() != 2 || ps.count() != n.total ||
      ps.length() != ps.channels * k * k)
    throw GeometryError("fold: patch matrix " + shape_string(ps.patches.shape()) +
                        " inconsistent with geometry for source (" +
                        std::to_string(ps.channels) + ", " + std::to_string(ps.height) + ", " +
                        std::to_string(ps.width) + ")");
  const std::size_t C = ps.channels, H = ps.height, W = ps.width;
  const Tensor cov = coverage(H, W, g);

  Tensor out = Tensor::image(C, H, W);
  // Per-channel accumulation keeps each output pixel's summation order fixed
  // (ascending patch index) independent of the thread split.
  parallel_for(C, [&](std::size_t c0, std::size_t c1) {
    std::vector<double> acc(H * W);
    for (std::size_t c = c0; c < c1; ++c) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t p = 0; p < n.total; ++p) {
        const auto oy = static_cast<std::ptrdiff_t>((p / n.cols) * g.stride) -
                        static_cast<std::ptrdiff_t>(g.pad);
        const auto ox = static_cast<std::ptrdiff_t>((p % n.cols) * g.stride) -
                        static_cast<std::ptrdiff_t>(g.pad);
        const float* row = ps.patches.raw() + p * ps.length() + c * k * k;
        for (std::size_t dy = 0; dy < k; ++dy) {
          const std::ptrdiff_t y = oy + static_cast<std::ptrdiff_t>(dy);
          if (y < 0 || y >= static_cast<std::ptrdiff_t>(H)) continue;
          for (std::size_t dx = 0; dx < k; ++dx) {
            const std::ptrdiff_t x = ox + static_cast<std::ptrdiff_t>(dx);
            if (x < 0 || x >= static_cast<std::ptrdiff_t>(W)) continue;
            acc[static_cast<std::size_t>(y) * W + static_cast<std::size_t>(x)] += row[dy * k + dx];
          }
        }
      }
      auto dst = out.plane(c);
      const auto cnt = cov.plane(0);
      for (std::size_t i = 0; i < H * W; ++i)
        dst[i] = cnt[i] > 0.0f ? static_cast<float>(acc[i] / cnt[i]) : 0.0f;
    }
  });
  return out;
}

}  // namespace patchxfer
