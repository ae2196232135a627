#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "patchxfer/error.hpp"
#include "patchxfer/patch.hpp"

using namespace patchxfer;

TEST_CASE("geometry validation") {
  CHECK_NOTHROW(PatchGeometry{}.validate());
  CHECK_THROWS_AS((PatchGeometry{0, 1, 0}.validate()), GeometryError);
  CHECK_THROWS_AS((PatchGeometry{3, 0, 0}.validate()), GeometryError);
  CHECK_THROWS_AS((PatchGeometry{3, 1, 3}.validate()), GeometryError);
  CHECK_THROWS_AS((PatchGeometry{7, 1, 0}.patches_along(6)), GeometryError);
  CHECK_THROWS_AS(unfold(Tensor::image(1, 3, 3), PatchGeometry{6, 1, 1}), GeometryError);
}

TEST_CASE("patch counts") {
  CHECK(patch_count(4, 4, {3, 1, 1}).total == 16);
  CHECK(patch_count(40, 40, {3, 1, 1}).total == 1600);
  const PatchCount c = patch_count(40, 40, {6, 2, 2});
  CHECK(c.rows == 20);
  CHECK(c.cols == 20);
  CHECK(c.total == 400);
  CHECK(patch_count(160, 160, {3, 1, 1}).total == 25600);
  CHECK(patch_count(12, 8, {4, 4, 0}).total == 3 * 2);
  CHECK(PatchGeometry{6, 2, 2}.scaled(2) == PatchGeometry{12, 4, 4});
}

TEST_CASE("unfold matches the index oracle on random shapes") {
  std::mt19937_64 rng(7);
  const Tensor t = oracle::random_image(2, 7, 9, rng);
  for (std::size_t k = 1; k <= 4; ++k)
    for (std::size_t s = 1; s <= 3; ++s)
      for (std::size_t p = 0; p <= 2 && p < k; ++p) {
        CAPTURE(k);
        CAPTURE(s);
        CAPTURE(p);
        const PatchSet ps = unfold(t, {k, s, p});
        CHECK(ps.patches == oracle::unfold(t, k, s, p));
        CHECK(ps.count() == patch_count(7, 9, {k, s, p}).total);
        CHECK(ps.length() == 2 * k * k);
      }
}

TEST_CASE("patch_count agrees with unfold on 200 random combinations") {
  std::mt19937_64 rng(8);
  int done = 0;
  while (done < 200) {
    const PatchGeometry g{1 + rng() % 6, 1 + rng() % 3, rng() % 3};
    if (g.pad >= g.window) continue;
    const std::size_t h = 1 + rng() % 13, w = 1 + rng() % 17;
    if (h + 2 * g.pad < g.window || w + 2 * g.pad < g.window) continue;
    const Tensor t = oracle::random_image(1, h, w, rng);
    const auto [rows, cols] = oracle::window_grid(h, w, g.window, g.stride, g.pad);
    const PatchCount c = patch_count(h, w, g);
    CHECK(c.rows == rows);
    CHECK(c.cols == cols);
    CHECK(unfold(t, g).count() == rows * cols);
    ++done;
  }
}

TEST_CASE("fold inverts unfold where every pixel is covered") {
  std::mt19937_64 rng(9);
  const Tensor t = oracle::random_image(3, 11, 8, rng);
  for (const PatchGeometry g : {PatchGeometry{3, 1, 1}, PatchGeometry{6, 2, 2}, PatchGeometry{2, 2, 0},
                                PatchGeometry{5, 3, 2}}) {
    const Tensor back = fold(unfold(t, g));
    const Tensor cov = coverage(11, 8, g);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < 11; ++y)
        for (std::size_t x = 0; x < 8; ++x) {
          if (cov.at(0, y, x) == 0) {
            CHECK(back.at(c, y, x) == 0.0f);
          } else {
            CHECK(std::abs(back.at(c, y, x) - t.at(c, y, x)) <= 1e-6);
          }
        }
  }
}

TEST_CASE("single window folds to itself") {
  std::mt19937_64 rng(10);
  const Tensor t = oracle::random_image(2, 5, 5, rng);
  const PatchSet ps = unfold(t, {5, 1, 0});
  CHECK(ps.count() == 1);
  CHECK(fold(ps) == t);
}

TEST_CASE("coverage matches brute-force counting") {
  for (const PatchGeometry g : {PatchGeometry{3, 2, 1}, PatchGeometry{4, 3, 0}, PatchGeometry{6, 2, 2}}) {
    const std::size_t H = 5, W = 7;
    const Tensor cov = coverage(H, W, g);
    const auto [rows, cols] = oracle::window_grid(H, W, g.window, g.stride, g.pad);
    for (std::size_t y = 0; y < H; ++y)
      for (std::size_t x = 0; x < W; ++x) {
        int n = 0;
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t q = 0; q < cols; ++q) {
            const long y0 = static_cast<long>(r * g.stride) - static_cast<long>(g.pad);
            const long x0 = static_cast<long>(q * g.stride) - static_cast<long>(g.pad);
            const long yy = static_cast<long>(y), xx = static_cast<long>(x);
            const long k = static_cast<long>(g.window);
            if (yy >= y0 && yy < y0 + k && xx >= x0 && xx < x0 + k) ++n;
          }
        CHECK(cov.at(0, y, x) == static_cast<float>(n));
      }
  }
}

TEST_CASE("fold rejects inconsistent patch sets") {
  PatchSet ps = unfold(Tensor::image(1, 6, 6, 1.0f), {3, 1, 1});
  ps.height = 7;
  CHECK_THROWS(fold(ps));
}
