#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "patchxfer/error.hpp"
#include "patchxfer/gradient.hpp"
#include "patchxfer/image.hpp"
#include "patchxfer/losses.hpp"
#include "patchxfer/metrics.hpp"

using namespace patchxfer;

namespace {

// Pixel values k/256: adding 0.25 to them is exact in float.
Tensor dyadic_image(std::size_t c, std::size_t h, std::size_t w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 191);
  Tensor t = Tensor::image(c, h, w);
  for (auto& v : t.data()) v = static_cast<float>(d(rng)) / 256.0f;
  return t;
}

double mean_abs_diff(const Tensor& a, const Tensor& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(static_cast<double>(a[i]) - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("Sobel kernels sum to zero") {
  int sx = 0, sy = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      sx += SobelKernels::kx[i][j];
      sy += SobelKernels::ky[i][j];
    }
  CHECK(sx == 0);
  CHECK(sy == 0);
}

TEST_CASE("gradient density of constants is exactly zero") {
  for (float c : {0.0f, 0.3f, 1.0f, -7.25f}) {
    const Tensor gd = gradient_density(Tensor::image(3, 9, 7, c));
    for (float v : gd.data()) CHECK(v == 0.0f);
  }
}

TEST_CASE("horizontal ramp has GD 8/W in the interior") {
  const std::size_t W = 16, H = 10;
  Tensor ramp = Tensor::image(1, H, W);
  for (std::size_t y = 0; y < H; ++y)
    for (std::size_t x = 0; x < W; ++x) ramp.at(0, y, x) = static_cast<float>(x) / W;
  const Tensor gd = gradient_density(ramp);
  // Hand convolution: rows weighted 1, 2, 1 of (I(x+1) - I(x-1)) = 2/W.
  const double expect = (1 + 2 + 1) * 2.0 / W;
  for (std::size_t y = 1; y + 1 < H; ++y)
    for (std::size_t x = 1; x + 1 < W; ++x) CHECK(std::abs(gd.at(0, y, x) - expect) <= 1e-6);
  const auto [gx, gy] = sobel_responses(ramp);
  CHECK(gx.at(0, 4, 4) == doctest::Approx(expect));
  CHECK(gy.at(0, 4, 4) == 0.0f);
}

TEST_CASE("vertical edge responds only next to the edge") {
  Tensor edge = Tensor::image(1, 8, 10);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 5; x < 10; ++x) edge.at(0, y, x) = 1.0f;
  const Tensor gd = gradient_density(edge);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 10; ++x) {
      if (x == 4 || x == 5)
        CHECK(gd.at(0, y, x) == doctest::Approx(4.0));
      else
        CHECK(gd.at(0, y, x) == 0.0f);
    }
}

TEST_CASE("GD ignores a constant offset") {
  std::mt19937_64 rng(61);
  const Tensor x = dyadic_image(3, 12, 9, rng);
  Tensor y = x;
  for (auto& v : y.data()) v += 0.25f;
  CHECK(gradient_density(x) == gradient_density(y));
  CHECK(grad_loss(x, y) == 0.0);
}

TEST_CASE("reconstruction and perceptual losses") {
  std::mt19937_64 rng(62);
  const Tensor a = oracle::random_image(3, 5, 6, rng, 0.0f, 1.0f);
  CHECK(l1_rec(a, a) == 0.0);
  Tensor b = a;
  for (auto& v : b.data()) v += 0.5f;
  CHECK(l1_rec(a, b) == doctest::Approx(0.5).epsilon(1e-7));
  const Tensor c = oracle::random_image(3, 5, 6, rng, 0.0f, 1.0f);
  CHECK(std::abs(l1_rec(a, c) - mean_abs_diff(a, c)) <= 1e-7);
  CHECK_THROWS_AS(l1_rec(a, Tensor::image(3, 5, 5)), ShapeError);

  FeaturePyramid p, q;
  for (std::size_t l = 0; l < 3; ++l) {
    p.levels[l] = oracle::random_image(2, 8 >> l, 8 >> l, rng);
    q.levels[l] = p.levels[l];
    for (auto& v : q.levels[l].data()) v += 0.125f;
  }
  CHECK(perceptual_loss(p, p, 1) == 0.0);
  CHECK(perceptual_loss(p, q, 2) == doctest::Approx(0.125).epsilon(1e-6));
  FeaturePyramid r = p;
  r.levels[0] = oracle::random_image(2, 8, 8, rng);
  CHECK(std::abs(perceptual_loss(p, r, 0) - mean_abs_diff(p.levels[0], r.levels[0])) <= 1e-7);
}

TEST_CASE("grad_loss is the mean GD difference") {
  std::mt19937_64 rng(63);
  const Tensor a = oracle::random_image(3, 7, 7, rng, 0.0f, 1.0f);
  const Tensor b = oracle::random_image(3, 7, 7, rng, 0.0f, 1.0f);
  CHECK(grad_loss(a, a) == 0.0);
  CHECK(std::abs(grad_loss(a, b) - mean_abs_diff(gradient_density(a), gradient_density(b))) <= 1e-7);
}

TEST_CASE("WGAN-GP losses") {
  CriticOutputs ones{{0.3, -0.2}, {0.1, 0.5}, {1.0, 1.0}};
  const AdversarialLosses l = wgan_gp_losses(ones);
  CHECK(l.penalty == 0.0);
  CHECK(l.discriminator == doctest::Approx(0.05 - 0.3));
  CHECK(l.generator == doctest::Approx(-0.05));

  CriticOutputs constant{{2.0, 2.0}, {2.0, 2.0}, {0.5, 3.0}};
  const AdversarialLosses k = wgan_gp_losses(constant, 4.0);
  CHECK(k.discriminator == doctest::Approx(4.0 * (0.25 + 4.0) / 2));
  CHECK(k.generator == -2.0);

  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> u(-2, 2), n(0, 3);
  for (int i = 0; i < 20; ++i) {
    CriticOutputs c;
    for (int j = 0; j < 7; ++j) {
      c.generated.push_back(u(rng));
      c.real.push_back(u(rng));
      c.grad_norms.push_back(n(rng));
    }
    double g = 0, r = 0, p = 0;
    for (int j = 0; j < 7; ++j) {
      g += c.generated[j];
      r += c.real[j];
      p += (c.grad_norms[j] - 1) * (c.grad_norms[j] - 1);
    }
    g /= 7;
    r /= 7;
    p /= 7;
    const AdversarialLosses got = wgan_gp_losses(c, 10.0);
    CHECK(std::abs(got.discriminator - (g - r + 10 * p)) <= 1e-7);
    CHECK(std::abs(got.generator + g) <= 1e-7);
    CHECK(got.penalty >= 0.0);
  }
  CHECK_THROWS(wgan_gp_losses(CriticOutputs{{1.0}, {1.0, 2.0}, {1.0}}));
}

TEST_CASE("total loss weighting") {
  CHECK(total_loss(LossParts{}) == 0.0);
  CHECK(std::abs(total_loss(LossParts{1, 1, 1, 1}) - 1.012) <= 1e-9);
  const LossParts base{0.4, 2.0, 5.0, -1.0};
  LossParts doubled = base;
  doubled.grad *= 2;
  CHECK(total_loss(doubled) - total_loss(base) == doctest::Approx(1e-3 * base.grad));
  const LossWeights w{2, 3, 4, 5};
  CHECK(total_loss(base, w) == doctest::Approx(2 * 0.4 + 3 * 2.0 + 4 * 5.0 - 5.0));
}

TEST_CASE("PSNR closed forms") {
  const Tensor a = Tensor::image(1, 16, 16, 0.3f);
  Tensor b = a;
  for (auto& v : b.data()) v += 0.1f;
  CHECK(std::abs(psnr(a, b) - 20.0) <= 1e-3);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, b) == psnr(b, a));
  CHECK_THROWS_AS(psnr(a, Tensor::image(1, 16, 15)), ShapeError);

  std::mt19937_64 rng(65);
  const Tensor x = oracle::random_image(1, 20, 20, rng, 0, 1), y = oracle::random_image(1, 20, 20, rng, 0, 1);
  CHECK(std::abs(psnr(x, y) - oracle::psnr(x, y)) <= 1e-6);
  // On luma, an RGB pair reduces to the Y pair.
  const Tensor p = oracle::random_image(3, 12, 12, rng, 0, 1), q = oracle::random_image(3, 12, 12, rng, 0, 1);
  CHECK(psnr(p, q, true) == doctest::Approx(psnr(to_luma_bt601(p), to_luma_bt601(q))));
}

TEST_CASE("SSIM") {
  std::mt19937_64 rng(66);
  const Tensor a = oracle::random_image(1, 24, 30, rng, 0, 1);
  CHECK(std::abs(ssim(a, a) - 1.0) <= 1e-9);
  for (int i = 0; i < 10; ++i) {
    const Tensor x = oracle::random_image(1, 16 + i, 20, rng, 0, 1);
    const Tensor y = oracle::random_image(1, 16 + i, 20, rng, 0, 1);
    const double s = ssim(x, y);
    CHECK(std::abs(s - oracle::ssim(x, y)) <= 1e-6);
    CHECK(s == doctest::Approx(ssim(y, x)).epsilon(1e-12));
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
  Tensor board = Tensor::image(1, 16, 16), inv = Tensor::image(1, 16, 16);
  for (std::size_t y = 0; y < 16; ++y)
    for (std::size_t x = 0; x < 16; ++x) {
      board.at(0, y, x) = static_cast<float>((x + y) % 2);
      inv.at(0, y, x) = 1.0f - board.at(0, y, x);
    }
  CHECK(ssim(board, inv) < 0.1);
  CHECK_THROWS_AS(ssim(Tensor::image(1, 10, 20), Tensor::image(1, 10, 20)), ShapeError);
  CHECK_THROWS_AS(ssim(Tensor::image(3, 20, 20), Tensor::image(3, 20, 20)), ShapeError);
}

TEST_CASE("luma metrics") {
  const Tensor a = Tensor::image(3, 12, 12, 0.5f);
  const QualityScores same = evaluate_luma(a, a);
  CHECK(std::isinf(same.psnr_db));
  CHECK(same.ssim == doctest::Approx(1.0));
}
