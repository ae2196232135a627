#include "patchxfer/bench.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "patchxfer/alloc_tracker.hpp"
#include "patchxfer/error.hpp"
#include "patchxfer/matcher.hpp"
#include "patchxfer/weights.hpp"

namespace patchxfer {

namespace {

std::size_t parse_size(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ParameterError("malformed " + what + " '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::string strip(std::string s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

Tensor random_features(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed) {
  UniformSource rng(seed);
  Tensor t = Tensor::image(c, h, w);
  for (auto& v : t.data()) v = rng.next(-1.0f, 1.0f);
  return t;
}

}  // namespace

BenchDims parse_dims(const std::string& text) {
  const std::string t = strip(text);
  const auto x = t.find_first_of("xX");
  if (x == std::string::npos) throw ParameterError("malformed dims '" + text + "', expected HxW");
  BenchDims d{parse_size(t.substr(0, x), "dims"), parse_size(t.substr(x + 1), "dims")};
  if (d.height == 0 || d.width == 0) throw ParameterError("dims must be positive: '" + text + "'");
  return d;
}

std::vector<PatchGeometry> parse_geometries(const std::string& text) {
  std::vector<PatchGeometry> out;
  for (const auto& item : split(strip(text), ';')) {
    if (item.empty()) continue;
    const auto parts = split(item, ',');
    if (parts.size() != 3)
      throw ParameterError("malformed config '" + item + "', expected k,s,p");
    PatchGeometry g{parse_size(parts[0], "window"), parse_size(parts[1], "stride"),
                    parse_size(parts[2], "padding")};
    try {
      g.validate();
    } catch (const GeometryError& e) {
      throw ParameterError("malformed config '" + item + "': " + e.what());
    }
    out.push_back(g);
  }
  if (out.empty()) throw ParameterError("no configurations in '" + text + "'");
  return out;
}

std::uint64_t parse_bytes(const std::string& text) {
  std::string t = strip(text);
  std::uint64_t mult = 1;
  std::string upper;
  for (char c : t) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& [suffix, m] : {std::pair{"TB", 1ull << 40}, std::pair{"GB", 1ull << 30},
                                  std::pair{"MB", 1ull << 20}, std::pair{"KB", 1ull << 10},
                                  std::pair{"B", 1ull}}) {
    const std::string s(suffix);
    if (upper.size() > s.size() && upper.compare(upper.size() - s.size(), s.size(), s) == 0) {
      mult = m;
      t.resize(t.size() - s.size());
      break;
    }
  }
  return static_cast<std::uint64_t>(parse_size(t, "byte count")) * mult;
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (const auto& d : cfg.dims)
    for (const auto& g : cfg.geometries) {
      BenchRow r;
      r.geometry = g;
      r.dims = d;
      const PatchCount n = patch_count(d.height, d.width, g);
      r.n_q = n.total;
      r.n_k = n.total;
      r.elements = static_cast<std::uint64_t>(r.n_q) * r.n_k;
      r.bytes_est = r.elements * sizeof(float);
      r.status = r.bytes_est > cfg.mem_limit ? "OFM" : "ok";

      if (cfg.measure_alloc && r.status == "ok" && r.bytes_est <= cfg.measure_limit) {
        const Tensor q = random_features(cfg.channels, d.height, d.width, cfg.seed);
        const Tensor k = random_features(cfg.channels, d.height, d.width, cfg.seed + 1);
        const PatchSet qp = unfold(q, g);
        const PatchSet kp = unfold(k, g);
        const std::size_t before = alloc::current_bytes();
        alloc::reset_peak();
        const auto t0 = std::chrono::steady_clock::now();
        {
          const CorrelationMatrix c = correlate(qp, kp);
          r.bytes_peak = alloc::peak_bytes() - before;
        }
        r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                   .count();
        r.status = "measured";
      }
      rows.push_back(r);
    }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "k,s,p,H,W,Nq,Nk,elements,bytes_est,bytes_peak,ms,status\n";
  for (const auto& r : rows)
    os << r.geometry.window << ',' << r.geometry.stride << ',' << r.geometry.pad << ','
       << r.dims.height << ',' << r.dims.width << ',' << r.n_q << ',' << r.n_k << ','
       << r.elements << ',' << r.bytes_est << ',' << r.bytes_peak << ',' << std::fixed
       << std::setprecision(3) << r.ms << std::defaultfloat << ',' << r.status << '\n';
}

void write_table(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << std::left << std::setw(10) << "k,s,p" << std::setw(12) << "dims" << std::right
     << std::setw(12) << "patches" << std::setw(18) << "matrix" << std::setw(16) << "bytes"
     << std::setw(14) << "peak" << std::setw(10) << "ms" << "  status\n";
  for (const auto& r : rows) {
    std::ostringstream geom, dims, shape;
    geom << r.geometry.window << ',' << r.geometry.stride << ',' << r.geometry.pad;
    dims << r.dims.height << 'x' << r.dims.width;
    shape << r.n_q << "x" << r.n_k;
    os << std::left << std::setw(10) << geom.str() << std::setw(12) << dims.str() << std::right
       << std::setw(12) << r.n_q << std::setw(18) << shape.str() << std::setw(16) << r.bytes_est
       << std::setw(14) << r.bytes_peak << std::setw(10) << std::fixed << std::setprecision(1)
       << r.ms << std::defaultfloat << "  " << r.status << '\n';
  }
}

}  // namespace patchxfer
