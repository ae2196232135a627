#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "patchxfer/patch.hpp"
#include "patchxfer/tensor.hpp"

namespace patchxfer {

/// Patch norms below this are treated as zero vectors that correlate as 0.
inline constexpr double kZeroNormThreshold = 1e-12;

/// Normalized inner products, (N_q, N_k), entries in [-1, 1] up to rounding.
struct CorrelationMatrix {
  Tensor values;

  std::size_t queries() const { return values.dim(0); }
  std::size_t keys() const { return values.dim(1); }
  float operator()(std::size_t i, std::size_t j) const { return values[i * keys() + j]; }
};

/// u best matches per query: row r holds the (r+1)-th best key index and its
/// score. Scores are non-increasing down each column; ties go to the lower index.
struct MatchResult {
  IndexTensor indices;  // (u, N_q)
  Tensor scores;        // (u, N_q)

  std::size_t top_u() const { return scores.dim(0); }
  std::size_t queries() const { return scores.dim(1); }
  std::int64_t index(std::size_t r, std::size_t i) const { return indices[r * queries() + i]; }
  float score(std::size_t r, std::size_t i) const { return scores[r * queries() + i]; }
};

/// Gathered textures T_1..T_u, each laid out on the query grid.
struct TextureStack {
  std::vector<PatchSet> textures;
};

/// Row-wise unit vectors; rows with norm below kZeroNormThreshold become zero.
/// Each element is x / ||x|| computed in double and rounded to float.
Tensor normalize_rows(const Tensor& rows);

CorrelationMatrix correlate(const PatchSet& q, const PatchSet& k);
CorrelationMatrix correlate_matrices(const Tensor& q_rows, const Tensor& k_rows);

/// Per-row argmax, lowest index on ties.
IndexTensor hard_select(const CorrelationMatrix& c);

/// Row i of the result is row idx[i] of src, copied verbatim. The result keeps
/// src's geometry and source dimensions.
PatchSet gather(const PatchSet& src, const IndexTensor& idx);

/// u largest entries per row of c.
MatchResult top_u(const CorrelationMatrix& c, std::size_t u);

/// Second search stage: correlates every query against every selected key
/// patch and keeps the u best. Indices address rows of k_selected.
MatchResult research_topk(const PatchSet& q, const PatchSet& k_selected, std::size_t u);

struct SearchResult {
  IndexTensor first_stage;  // H', (N_q), rows of the key patch set
  MatchResult match;        // H and S; H addresses original key/value rows
  TextureStack textures;
};

/// Gathers the u texture maps for `match` from a value tensor. The value
/// tensor may be an integer multiple r of the key resolution; its windows are
/// then r times larger so that value and key patch rows correspond one to one,
/// and the textures land on the query grid scaled by r.
TextureStack transfer_textures(const Tensor& value, std::size_t key_height,
                               std::size_t key_width, const PatchGeometry& key_geometry,
                               const MatchResult& match, std::size_t query_height,
                               std::size_t query_width);

/// Full search: unfold Q and K, correlate, keep the per-query best key,
/// re-search the queries against that selection for the top u, then remap the
/// indices back to K's rows and gather textures from V.
SearchResult two_stage_search(const Tensor& query, const Tensor& key, const Tensor& value,
                              const PatchGeometry& g, std::size_t u);

}  // namespace patchxfer
