#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "patchxfer/error.hpp"
#include "patchxfer/matcher.hpp"
#include "patchxfer/parallel.hpp"

using namespace patchxfer;

namespace {

Tensor random_rows(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  Tensor t(Shape{n, d});
  for (auto& v : t.data()) v = u(rng);
  return t;
}

CorrelationMatrix matrix(std::size_t rows, std::size_t cols, std::vector<float> v) {
  return CorrelationMatrix{Tensor(Shape{rows, cols}, std::move(v))};
}

PatchSet rows_as_patches(const Tensor& rows) {
  // Treat each row as a 1x1 window over a (d, 1, n) map; only .patches matters here.
  return PatchSet{rows, PatchGeometry{1, 1, 0}, rows.dim(1), 1, rows.dim(0)};
}

}  // namespace

TEST_CASE("normalize_rows: unit length, zero rows stay zero") {
  Tensor t(Shape{3, 2}, std::vector<float>{3, 4, 0, 0, 1e-20f, 0});
  const Tensor n = normalize_rows(t);
  CHECK(n[0] == doctest::Approx(0.6));
  CHECK(n[1] == doctest::Approx(0.8));
  CHECK(n[2] == 0.0f);
  CHECK(n[3] == 0.0f);
  CHECK(n[4] == 0.0f);
}

TEST_CASE("correlate: self, orthogonal and scalar oracle") {
  Tensor q(Shape{2, 4}, std::vector<float>{1, 2, 0, 0, 0, 0, 3, 1});
  const CorrelationMatrix c = correlate_matrices(q, q);
  CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(c(0, 1)) <= 1e-6);

  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    const Tensor a = random_rows(5, 8, rng), b = random_rows(7, 8, rng);
    CHECK(correlate_matrices(a, b).values == oracle::correlation(a, b));
  }
  CHECK_THROWS_AS(correlate_matrices(random_rows(2, 3, rng), random_rows(2, 4, rng)), ShapeError);
}

TEST_CASE("correlation stays within [-1, 1]") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 20; ++i) {
    const Tensor a = random_rows(9, 1 + rng() % 40, rng);
    const Tensor b = random_rows(11, a.dim(1), rng);
    const CorrelationMatrix c = correlate_matrices(a, b);
    for (float v : c.values.data()) {
      CHECK(v <= 1.0f + 1e-5f);
      CHECK(v >= -1.0f - 1e-5f);
    }
  }
}

TEST_CASE("zero patches correlate as zero") {
  Tensor a(Shape{2, 3}, std::vector<float>{0, 0, 0, 1, 1, 1});
  const CorrelationMatrix c = correlate_matrices(a, a);
  CHECK(c(0, 0) == 0.0f);
  CHECK(c(0, 1) == 0.0f);
  CHECK(c(1, 0) == 0.0f);
  CHECK(c.values.all_finite());
}

TEST_CASE("hard_select breaks ties toward the lowest index") {
  CHECK(hard_select(matrix(1, 3, {0.1f, 0.9f, 0.9f})).data == std::vector<std::int64_t>{1});
  CHECK(hard_select(matrix(3, 3, {1, 0.2f, 0.1f, 0.3f, 1, 0.2f, 0, 0, 1})).data ==
        std::vector<std::int64_t>{0, 1, 2});

  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> d(0, 4);  // coarse values force ties
  std::vector<float> v(100 * 9);
  for (auto& x : v) x = static_cast<float>(d(rng)) / 4.0f;
  const auto c = matrix(100, 9, v);
  const IndexTensor h = hard_select(c);
  for (std::size_t i = 0; i < 100; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < 9; ++j)
      if (v[i * 9 + j] > v[i * 9 + best]) best = j;
    CHECK(h[i] == static_cast<std::int64_t>(best));
  }
}

TEST_CASE("gather copies rows verbatim") {
  std::mt19937_64 rng(24);
  const PatchSet src = rows_as_patches(random_rows(6, 5, rng));
  IndexTensor id{Shape{6}, {0, 1, 2, 3, 4, 5}};
  CHECK(gather(src, id).patches == src.patches);

  IndexTensor zeros{Shape{4}, {0, 0, 0, 0}};
  const PatchSet z = gather(src, zeros);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t e = 0; e < 5; ++e) CHECK(z.patches[i * 5 + e] == src.patches[e]);

  std::vector<std::int64_t> perm(6);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const PatchSet p = gather(src, IndexTensor{Shape{6}, perm});
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t e = 0; e < 5; ++e)
      CHECK(p.patches[i * 5 + e] == src.patches[static_cast<std::size_t>(perm[i]) * 5 + e]);

  CHECK_THROWS_AS(gather(src, IndexTensor{Shape{1}, {6}}), ParameterError);
  CHECK_THROWS_AS(gather(src, IndexTensor{Shape{1}, {-1}}), ParameterError);
}

TEST_CASE("top_u ordering") {
  const MatchResult m = top_u(matrix(1, 3, {0.2f, 0.8f, 0.5f}), 2);
  CHECK(m.index(0, 0) == 1);
  CHECK(m.index(1, 0) == 2);
  CHECK(m.score(0, 0) == 0.8f);
  CHECK(m.score(1, 0) == 0.5f);

  const MatchResult t = top_u(matrix(1, 4, {0.5f, 0.7f, 0.5f, 0.7f}), 4);
  CHECK(t.indices.data == std::vector<std::int64_t>{1, 3, 0, 2});

  CHECK_THROWS_AS(top_u(matrix(1, 2, {0, 0}), 3), ParameterError);
  CHECK_THROWS_AS(top_u(matrix(1, 2, {0, 0}), 0), ParameterError);
}

TEST_CASE("research_topk matches a full-sort oracle") {
  std::mt19937_64 rng(25);
  for (int i = 0; i < 50; ++i) {
    const std::size_t u = 1 + static_cast<std::size_t>(i % 3);
    const Tensor q = random_rows(8, 6, rng);
    const Tensor k = random_rows(8, 6, rng);
    const MatchResult m = research_topk(rows_as_patches(q), rows_as_patches(k), u);
    std::vector<std::int64_t> idx;
    std::vector<float> score;
    oracle::best_u(oracle::correlation(q, k), u, idx, score);
    CHECK(m.indices.data == idx);
    CHECK(std::vector<float>(m.scores.data().begin(), m.scores.data().end()) == score);
    for (std::size_t col = 0; col < 8; ++col)
      for (std::size_t r = 1; r < u; ++r) CHECK(m.score(r - 1, col) >= m.score(r, col));
    if (u == 1) CHECK(m.indices.data == hard_select(correlate_matrices(q, k)).data);
  }
  CHECK_THROWS_AS(research_topk(rows_as_patches(random_rows(3, 2, rng)),
                                rows_as_patches(random_rows(3, 2, rng)), 4),
                  ParameterError);
}

TEST_CASE("self match finds every query") {
  std::mt19937_64 rng(26);
  const Tensor f = oracle::random_image(3, 12, 12, rng);
  const SearchResult r = two_stage_search(f, f, f, {3, 1, 1}, 1);
  for (std::size_t i = 0; i < r.match.queries(); ++i) {
    CHECK(r.first_stage[i] == static_cast<std::int64_t>(i));
    CHECK(r.match.index(0, i) == static_cast<std::int64_t>(i));
    CHECK(r.match.score(0, i) == doctest::Approx(1.0).epsilon(1e-6));
  }
  REQUIRE(r.textures.textures.size() == 1);
  CHECK(r.textures.textures[0].patches == unfold(f, {3, 1, 1}).patches);
}

TEST_CASE("two_stage_search equals the monolithic reference") {
  std::mt19937_64 rng(27);
  for (int i = 0; i < 10; ++i) {
    const Tensor q = oracle::random_image(2, 16, 16, rng);
    const Tensor k = oracle::random_image(2, 16, 16, rng);
    const Tensor v = oracle::random_image(4, 16, 16, rng);
    const SearchResult r = two_stage_search(q, k, v, {6, 2, 2}, 2);
    const oracle::Matches m = oracle::two_stage(q, k, 6, 2, 2, 2);
    CHECK(r.first_stage.data == m.first);
    CHECK(r.match.indices.data == m.index);
    CHECK(std::vector<float>(r.match.scores.data().begin(), r.match.scores.data().end()) == m.score);

    // T_i rows are the V rows named by H.
    const PatchSet vp = unfold(v, {6, 2, 2});
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t j = 0; j < r.match.queries(); ++j) {
        const auto h = static_cast<std::size_t>(r.match.index(t, j));
        const auto got = r.textures.textures[t].patches.row(j);
        const auto want = vp.patches.row(h);
        CHECK(std::equal(got.begin(), got.end(), want.begin()));
      }
  }
}

TEST_CASE("constant query against random keys") {
  std::mt19937_64 rng(28);
  const Tensor q = Tensor::image(2, 10, 10, 0.5f);
  const Tensor k = oracle::random_image(2, 10, 10, rng);
  const SearchResult r = two_stage_search(q, k, k, {3, 1, 1}, 3);
  const oracle::Matches m = oracle::two_stage(q, k, 3, 1, 1, 3);
  CHECK(r.match.indices.data == m.index);
  CHECK(std::vector<float>(r.match.scores.data().begin(), r.match.scores.data().end()) == m.score);
}

TEST_CASE("stage-2 score is at least the query's own selected key") {
  std::mt19937_64 rng(29);
  const Tensor q = oracle::random_image(3, 14, 11, rng);
  const Tensor k = oracle::random_image(3, 14, 11, rng);
  const PatchGeometry g{3, 1, 1};
  const SearchResult r = two_stage_search(q, k, k, g, 2);
  const PatchSet qp = unfold(q, g), kp = unfold(k, g);
  const CorrelationMatrix c2 = correlate(qp, gather(kp, r.first_stage));
  for (std::size_t i = 0; i < qp.count(); ++i) CHECK(r.match.score(0, i) >= c2(i, i) - 1e-6f);
}

TEST_CASE("indices ignore a positive rescaling of the keys") {
  std::mt19937_64 rng(30);
  const Tensor q = oracle::random_image(2, 12, 12, rng);
  const Tensor k = oracle::random_image(2, 12, 12, rng);
  Tensor k4 = k;
  for (auto& v : k4.data()) v *= 4.0f;  // exact in binary floating point
  const SearchResult a = two_stage_search(q, k, k, {6, 2, 2}, 2);
  const SearchResult b = two_stage_search(q, k4, k4, {6, 2, 2}, 2);
  CHECK(a.first_stage == b.first_stage);
  CHECK(a.match.indices == b.match.indices);

  Tensor k3 = k;
  for (auto& v : k3.data()) v *= 3.0f;
  const SearchResult c = two_stage_search(q, k3, k3, {6, 2, 2}, 2);
  CHECK(a.match.indices == c.match.indices);
}

TEST_CASE("search is identical across thread counts") {
  std::mt19937_64 rng(31);
  const Tensor q = oracle::random_image(4, 20, 20, rng);
  const Tensor k = oracle::random_image(4, 20, 20, rng);
  set_thread_count(1);
  const SearchResult one = two_stage_search(q, k, k, {3, 1, 1}, 3);
  set_thread_count(5);
  const SearchResult five = two_stage_search(q, k, k, {3, 1, 1}, 3);
  set_thread_count(0);
  CHECK(one.match.indices == five.match.indices);
  CHECK(one.match.scores == five.match.scores);
}

TEST_CASE("value at twice the key resolution") {
  std::mt19937_64 rng(32);
  const Tensor q = oracle::random_image(2, 8, 8, rng);
  const Tensor k = oracle::random_image(2, 8, 8, rng);
  const Tensor v = oracle::random_image(3, 16, 16, rng);
  const SearchResult r = two_stage_search(q, k, v, {3, 1, 1}, 1);
  const PatchSet& t = r.textures.textures.at(0);
  CHECK(t.geometry == PatchGeometry{6, 2, 2});
  CHECK(t.height == 16);
  CHECK(t.count() == 64);
  const PatchSet vp = unfold(v, {6, 2, 2});
  for (std::size_t j = 0; j < 64; ++j) {
    const auto got = t.patches.row(j);
    const auto want = vp.patches.row(static_cast<std::size_t>(r.match.index(0, j)));
    CHECK(std::equal(got.begin(), got.end(), want.begin()));
  }
  CHECK(fold(t).shape() == Shape{3, 16, 16});
}
