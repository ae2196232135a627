#include "patchxfer/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "patchxfer/error.hpp"
#include "patchxfer/image.hpp"

namespace patchxfer {

namespace {

void require_same(const Tensor& a, const Tensor& b, const char* where) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(where) + ": shape mismatch " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size));
  const double mid = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - mid;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Separable "valid" filtering of a plane with a 1-D kernel in both axes.
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t H, std::size_t W,
                                 const std::vector<double>& k) {
  const std::size_t n = k.size();
  const std::size_t oh = H - n + 1, ow = W - n + 1;
  std::vector<double> rows(H * ow);
  for (std::size_t y = 0; y < H; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * src[y * W + x + i];
      rows[y * ow + x] = acc;
    }
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += k[i] * rows[(y + i) * ow + x];
      out[y * ow + x] = acc;
    }
  return out;
}

}  // namespace

double mse(const Tensor& a, const Tensor& b) {
  require_same(a, b, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double psnr(const Tensor& a, const Tensor& b, bool on_luma) {
  require_same(a, b, "psnr");
  const double err = on_luma ? mse(to_luma_bt601(a), to_luma_bt601(b)) : mse(a, b);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / err);
}

double ssim(const Tensor& a, const Tensor& b, const SsimParams& params) {
  require_same(a, b, "ssim");
  require_image(a, "ssim");
  if (a.channels() != 1) throw ShapeError("ssim: expected a single-channel image");
  const auto win = static_cast<std::size_t>(params.window);
  if (a.height() < win || a.width() < win)
    throw ShapeError("ssim: image " + shape_string(a.shape()) + " smaller than the " +
                     std::to_string(win) + "x" + std::to_string(win) + " window");

  const std::size_t H = a.height(), W = a.width();
  std::vector<double> x(H * W), y(H * W), xx(H * W), yy(H * W), xy(H * W);
  for (std::size_t i = 0; i < H * W; ++i) {
    x[i] = a[i];
    y[i] = b[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto k = gaussian_window(params.window, params.sigma);
  const auto mx = filter_valid(x, H, W, k);
  const auto my = filter_valid(y, H, W, k);
  const auto sxx = filter_valid(xx, H, W, k);
  const auto syy = filter_valid(yy, H, W, k);
  const auto sxy = filter_valid(xy, H, W, k);

  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

QualityScores evaluate_luma(const Tensor& a_rgb, const Tensor& b_rgb) {
  require_same(a_rgb, b_rgb, "evaluate_luma");
  const Tensor ya = to_luma_bt601(a_rgb);
  const Tensor yb = to_luma_bt601(b_rgb);
  return {psnr(ya, yb), ssim(ya, yb)};
}

}  // namespace patchxfer
