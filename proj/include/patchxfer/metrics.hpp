#pragma once

#include "patchxfer/tensor.hpp"

namespace patchxfer {

/// Mean squared error over all elements, accumulated in double.
double mse(const Tensor& a, const Tensor& b);

/// 10 log10(1 / mse) for images in [0, 1]; +infinity for identical inputs.
/// With on_luma, both (3, H, W) inputs are converted to BT.601 Y first.
double psnr(const Tensor& a, const Tensor& b, bool on_luma = false);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Mean SSIM over every full Gaussian window inside a (1, H, W) image pair.
double ssim(const Tensor& a, const Tensor& b, const SsimParams& params = {});

/// PSNR / SSIM pair on the luma channel, as reported by the `metrics` command.
struct QualityScores {
  double psnr_db = 0.0;
  double ssim = 0.0;
};
QualityScores evaluate_luma(const Tensor& a_rgb, const Tensor& b_rgb);

}  // namespace patchxfer
