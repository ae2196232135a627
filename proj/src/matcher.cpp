#include "patchxfer/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "patchxfer/error.hpp"
#include "patchxfer/parallel.hpp"

namespace patchxfer {

Tensor normalize_rows(const Tensor& rows) {
  if (rows.rank() != 2) throw ShapeError("normalize_rows: expected a matrix");
  const std::size_t n = rows.dim(0), d = rows.dim(1);
  Tensor out(rows.shape());
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const float* src = rows.raw() + i * d;
      float* dst = out.raw() + i * d;
      double sq = 0.0;
      for (std::size_t e = 0; e < d; ++e) sq += static_cast<double>(src[e]) * src[e];
      const double norm = std::sqrt(sq);
      if (norm < kZeroNormThreshold) continue;
      for (std::size_t e = 0; e < d; ++e) dst[e] = static_cast<float>(src[e] / norm);
    }
  });
  return out;
}

CorrelationMatrix correlate_matrices(const Tensor& q_rows, const Tensor& k_rows) {
  if (q_rows.rank() != 2 || k_rows.rank() != 2)
    throw ShapeError("correlate: expected patch matrices");
  if (q_rows.dim(1) != k_rows.dim(1))
    throw ShapeError("correlate: patch length " + std::to_string(q_rows.dim(1)) +
                     " vs " + std::to_string(k_rows.dim(1)));
  const Tensor qn = normalize_rows(q_rows);
  const Tensor kn = normalize_rows(k_rows);
  const std::size_t nq = qn.dim(0), nk = kn.dim(0), d = qn.dim(1);
  CorrelationMatrix c{Tensor(Shape{nq, nk})};
  float* out = c.values.raw();

  // Four independent accumulators, each summing its own dot product in
  // ascending element order.
  parallel_for(nq, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const float* q = qn.raw() + i * d;
      float* row = out + i * nk;
      std::size_t j = 0;
      for (; j + 4 <= nk; j += 4) {
        const float* k0 = kn.raw() + j * d;
        const float* k1 = k0 + d;
        const float* k2 = k1 + d;
        const float* k3 = k2 + d;
        double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
        for (std::size_t e = 0; e < d; ++e) {
          const double qe = q[e];
          a0 += qe * k0[e];
          a1 += qe * k1[e];
          a2 += qe * k2[e];
          a3 += qe * k3[e];
        }
        row[j] = static_cast<float>(a0);
        row[j + 1] = static_cast<float>(a1);
        row[j + 2] = static_cast<float>(a2);
        row[j + 3] = static_cast<float>(a3);
      }
      for (; j < nk; ++j) {
        const float* kj = kn.raw() + j * d;
        double a = 0.0;
        for (std::size_t e = 0; e < d; ++e) a += static_cast<double>(q[e]) * kj[e];
        row[j] = static_cast<float>(a);
      }
    }
  });
  return c;
}

CorrelationMatrix correlate(const PatchSet& q, const PatchSet& k) {
  return correlate_matrices(q.patches, k.patches);
}

IndexTensor hard_select(const CorrelationMatrix& c) {
  const std::size_t nq = c.queries(), nk = c.keys();
  IndexTensor idx{Shape{nq}, std::vector<std::int64_t>(nq)};
  for (std::size_t i = 0; i < nq; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < nk; ++j)
      if (c(i, j) > c(i, best)) best = j;
    idx[i] = static_cast<std::int64_t>(best);
  }
  return idx;
}

PatchSet gather(const PatchSet& src, const IndexTensor& idx) {
  const std::size_t n = src.count(), len = src.length();
  if (idx.data.empty()) throw ShapeError("gather: empty index list");
  PatchSet out{Tensor(Shape{idx.data.size(), len}), src.geometry, src.channels, src.height,
               src.width};
  for (std::size_t i = 0; i < idx.data.size(); ++i) {
    const std::int64_t r = idx[i];
    if (r < 0 || static_cast<std::size_t>(r) >= n)
      throw ParameterError("gather: index " + std::to_string(r) + " out of range [0, " +
                           std::to_string(n) + ")");
    std::copy_n(src.patches.raw() + static_cast<std::size_t>(r) * len, len,
                out.patches.raw() + i * len);
  }
  return out;
}

MatchResult top_u(const CorrelationMatrix& c, std::size_t u) {
  const std::size_t nq = c.queries(), nk = c.keys();
  if (u < 1 || u > nk)
    throw ParameterError("top_u: u = " + std::to_string(u) + " must be in [1, " +
                         std::to_string(nk) + "]");
  MatchResult m{IndexTensor{Shape{u, nq}, std::vector<std::int64_t>(u * nq)},
                Tensor(Shape{u, nq})};
  parallel_for(nq, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> order(nk);
    for (std::size_t i = begin; i < end; ++i) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(u), order.end(),
                        [&](std::size_t a, std::size_t b) {
                          const float sa = c(i, a), sb = c(i, b);
                          return sa > sb || (sa == sb && a < b);
                        });
      for (std::size_t r = 0; r < u; ++r) {
        m.indices[r * nq + i] = static_cast<std::int64_t>(order[r]);
        m.scores[r * nq + i] = c(i, order[r]);
      }
    }
  });
  return m;
}

MatchResult research_topk(const PatchSet& q, const PatchSet& k_selected, std::size_t u) {
  if (u < 1 || u > k_selected.count())
    throw ParameterError("research_topk: u = " + std::to_string(u) +
                         " exceeds the selected key count " +
                         std::to_string(k_selected.count()));
  return top_u(correlate(q, k_selected), u);
}

TextureStack transfer_textures(const Tensor& value, std::size_t key_height,
                               std::size_t key_width, const PatchGeometry& key_geometry,
                               const MatchResult& match, std::size_t query_height,
                               std::size_t query_width) {
  require_image(value, "transfer");
  if (value.height() % key_height != 0 || value.width() % key_width != 0 ||
      value.height() / key_height != value.width() / key_width)
    throw ShapeError("transfer: value " + shape_string(value.shape()) +
                     " is not an integer multiple of the key grid " +
                     std::to_string(key_height) + "x" + std::to_string(key_width));
  const std::size_t r = value.height() / key_height;
  const PatchGeometry vg = key_geometry.scaled(r);
  const PatchSet vp = unfold(value, vg);
  const std::size_t nk = patch_count(key_height, key_width, key_geometry).total;
  if (vp.count() != nk)
    throw GeometryError("transfer: value yields " + std::to_string(vp.count()) +
                        " patches, key grid has " + std::to_string(nk));
  const std::size_t qh = query_height * r, qw = query_width * r;
  if (patch_count(qh, qw, vg).total != match.queries())
    throw GeometryError("transfer: query grid does not match the match result");

  TextureStack stack;
  const std::size_t nq = match.queries();
  for (std::size_t t = 0; t < match.top_u(); ++t) {
    IndexTensor row{Shape{nq}, std::vector<std::int64_t>(
                                   match.indices.data.begin() + static_cast<std::ptrdiff_t>(t * nq),
                                   match.indices.data.begin() + static_cast<std::ptrdiff_t>((t + 1) * nq))};
    PatchSet ps = gather(vp, row);
    ps.height = qh;
    ps.width = qw;
    stack.textures.push_back(std::move(ps));
  }
  return stack;
}

SearchResult two_stage_search(const Tensor& query, const Tensor& key, const Tensor& value,
                              const PatchGeometry& g, std::size_t u) {
  require_image(query, "two_stage_search");
  require_image(key, "two_stage_search");
  if (query.channels() != key.channels())
    throw ShapeError("two_stage_search: query has " + std::to_string(query.channels()) +
                     " channels, key has " + std::to_string(key.channels()));
  const PatchSet qp = unfold(query, g);
  const PatchSet kp = unfold(key, g);

  SearchResult out;
  out.first_stage = hard_select(correlate(qp, kp));
  const PatchSet k_selected = gather(kp, out.first_stage);
  MatchResult local = research_topk(qp, k_selected, u);

  out.match.scores = std::move(local.scores);
  out.match.indices = std::move(local.indices);
  for (auto& h : out.match.indices.data) h = out.first_stage[static_cast<std::size_t>(h)];

  out.textures = transfer_textures(value, key.height(), key.width(), g, out.match,
                                   query.height(), query.width());
  return out;
}

}  // namespace patchxfer
