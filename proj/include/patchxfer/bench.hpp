#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "patchxfer/patch.hpp"

namespace patchxfer {

struct BenchDims {
  std::size_t height = 0;
  std::size_t width = 0;
};

struct BenchConfig {
  std::vector<BenchDims> dims;
  std::vector<PatchGeometry> geometries;
  bool measure_alloc = false;
  std::uint64_t mem_limit = 24ull << 30;      // cells above this are OFM
  std::uint64_t measure_limit = 1ull << 30;   // largest matrix actually built
  std::size_t channels = 1;
  std::uint64_t seed = 0;
};

/// One dims x geometry cell. Queries and keys come from feature maps of the
/// same size, so n_q == n_k.
struct BenchRow {
  PatchGeometry geometry;
  BenchDims dims;
  std::size_t n_q = 0;
  std::size_t n_k = 0;
  std::uint64_t elements = 0;   // n_q * n_k
  std::uint64_t bytes_est = 0;  // elements * 4
  std::uint64_t bytes_peak = 0; // 0 unless measured
  double ms = 0.0;
  std::string status;           // "ok", "measured" or "OFM"
};

/// "HxW", e.g. "40x40".
BenchDims parse_dims(const std::string& text);
/// "k,s,p;k,s,p".
std::vector<PatchGeometry> parse_geometries(const std::string& text);
/// Plain bytes or a KB/MB/GB/TB suffix (powers of 1024).
std::uint64_t parse_bytes(const std::string& text);

/// Analytic counts for every cell; with measure_alloc, cells under both limits
/// also build the correlation matrix from random features and record the
/// peak heap growth and wall time of that call.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

/// Header k,s,p,H,W,Nq,Nk,elements,bytes_est,bytes_peak,ms,status.
void write_csv(std::ostream& os, const std::vector<BenchRow>& rows);
void write_table(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace patchxfer
