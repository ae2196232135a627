#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "patchxfer/error.hpp"
#include "patchxfer/nn.hpp"
#include "patchxfer/parallel.hpp"

using namespace patchxfer;

namespace {

ConvParams random_conv(std::size_t co, std::size_t ci, std::mt19937_64& rng, float scale = 0.3f) {
  std::uniform_real_distribution<float> u(-scale, scale);
  ConvParams p{Tensor(Shape{co, ci, 3, 3}), Tensor(Shape{co})};
  for (auto& v : p.weight.data()) v = u(rng);
  for (auto& v : p.bias.data()) v = u(rng);
  return p;
}

ConvParams zero_conv(std::size_t co, std::size_t ci) {
  return {Tensor(Shape{co, ci, 3, 3}), Tensor(Shape{co})};
}

}  // namespace

TEST_CASE("conv3x3 equals the quadruple-loop oracle bit for bit") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 40; ++i) {
    const std::size_t ci = 1 + rng() % 7, co = 1 + rng() % 19;
    const std::size_t h = 1 + rng() % 13, w = 1 + rng() % 21;
    const std::size_t stride = 1 + rng() % 2;
    CAPTURE(ci);
    CAPTURE(co);
    CAPTURE(h);
    CAPTURE(w);
    CAPTURE(stride);
    const Tensor x = oracle::random_image(ci, h, w, rng);
    const ConvParams p = random_conv(co, ci, rng);
    const Tensor got = conv3x3_forward(x, p, stride);
    CHECK(got == oracle::conv3x3(x, p.weight, p.bias, stride));
  }
}

TEST_CASE("conv3x3 output shapes") {
  std::mt19937_64 rng(42);
  const ConvParams p = random_conv(5, 2, rng);
  CHECK(conv3x3_forward(Tensor::image(2, 7, 9), p).shape() == Shape{5, 7, 9});
  CHECK(conv3x3_forward(Tensor::image(2, 7, 9), p, 2).shape() == Shape{5, 4, 5});
  CHECK(conv3x3_forward(Tensor::image(2, 1, 1), p, 2).shape() == Shape{5, 1, 1});
  CHECK_THROWS_AS(conv3x3_forward(Tensor::image(3, 4, 4), p), ShapeError);
  CHECK_THROWS_AS(conv3x3_forward(Tensor::image(2, 4, 4), p, 3), ParameterError);
  ConvParams bad = p;
  bad.bias = Tensor(Shape{4});
  CHECK_THROWS_AS(conv3x3_forward(Tensor::image(2, 4, 4), bad), ShapeError);
}

TEST_CASE("identity kernel and zero weights") {
  std::mt19937_64 rng(43);
  const Tensor x = oracle::random_image(3, 6, 10, rng);
  ConvParams id = zero_conv(3, 3);
  for (std::size_t c = 0; c < 3; ++c) id.weight[(c * 3 + c) * 9 + 4] = 1.0f;
  CHECK(conv3x3_forward(x, id) == x);

  ConvParams z = zero_conv(4, 3);
  for (std::size_t c = 0; c < 4; ++c) z.bias[c] = static_cast<float>(c);
  const Tensor y = conv3x3_forward(x, z);
  for (std::size_t c = 0; c < 4; ++c)
    for (float v : y.plane(c)) CHECK(v == static_cast<float>(c));
}

TEST_CASE("relu") {
  Tensor t(Shape{4}, std::vector<float>{-1, 0, 2, -0.5f});
  CHECK(relu(t) == Tensor(Shape{4}, std::vector<float>{0, 0, 2, 0}));
}

TEST_CASE("residual block composition") {
  std::mt19937_64 rng(44);
  const Tensor x = oracle::random_image(4, 5, 7, rng);
  const ResidualBlockParams b{random_conv(4, 4, rng), random_conv(4, 4, rng)};
  const Tensor branch = oracle::conv3x3(relu(oracle::conv3x3(x, b.conv1.weight, b.conv1.bias)),
                                        b.conv2.weight, b.conv2.bias);
  CHECK(residual_block(x, b) == add(x, branch));

  const ResidualBlockParams zero{zero_conv(4, 4), zero_conv(4, 4)};
  CHECK(residual_block(x, zero) == x);
  const std::vector<ResidualBlockParams> chain(5, zero);
  CHECK(residual_chain(x, chain) == x);
}

TEST_CASE("conv output is independent of the thread count") {
  std::mt19937_64 rng(45);
  const Tensor x = oracle::random_image(16, 33, 29, rng);
  const ConvParams p = random_conv(24, 16, rng);
  set_thread_count(1);
  const Tensor a = conv3x3_forward(x, p), a2 = conv3x3_forward(x, p, 2);
  set_thread_count(3);
  const Tensor b = conv3x3_forward(x, p), b2 = conv3x3_forward(x, p, 2);
  set_thread_count(0);
  CHECK(a == b);
  CHECK(a2 == b2);
}
