#include "patchxfer/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "patchxfer/bench.hpp"
#include "patchxfer/error.hpp"
#include "patchxfer/gradient.hpp"
#include "patchxfer/image.hpp"
#include "patchxfer/metrics.hpp"
#include "patchxfer/pipeline.hpp"
#include "patchxfer/tensor_io.hpp"

namespace patchxfer {

namespace {

constexpr const char* kLumaNote =
    "Metrics use the Y channel of full-range BT.601 YCbCr "
    "(Y = 0.299 R + 0.587 G + 0.114 B, no 16-235 studio swing).";

struct PipelineFlags {
  std::string config_path;
  std::optional<std::size_t> window, stride, pad, top_u;
  std::optional<std::string> extractor, manifest;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key=value config file (flags override it)")
        ->check(CLI::ExistingFile);
    app->add_option("--window", window, "patch window k (default 6)");
    app->add_option("--stride", stride, "patch stride s (default 2)");
    app->add_option("--pad", pad, "patch padding p (default 2)");
    app->add_option("--top-u", top_u, "matches kept per query (default 1)");
    app->add_option("--extractor", extractor,
                    "builtin-handcrafted (default), builtin-random or file:<dir>");
    app->add_option("--manifest", manifest, "weight manifest; seeded random weights if absent");
    app->add_option("--seed", seed, "seed for random weights and extractors (default 0)");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_path.empty()) apply_config(read_config_file(config_path), cfg);
    if (window) cfg.geometry.window = *window;
    if (stride) cfg.geometry.stride = *stride;
    if (pad) cfg.geometry.pad = *pad;
    if (top_u) cfg.top_u = *top_u;
    if (extractor) cfg.extractor = *extractor;
    if (manifest) cfg.manifest = *manifest;
    if (seed) cfg.seed = *seed;
    cfg.geometry.validate();
    if (cfg.top_u < 1) throw ParameterError("--top-u must be >= 1");
    return cfg;
  }
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string format_psnr(double db) {
  if (std::isinf(db)) return "inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << db;
  return os.str();
}

int cmd_sr(const std::string& lr_path, const std::string& ref_path, const std::string& out_path,
           const PipelineFlags& flags, std::ostream& out) {
  const PipelineConfig cfg = flags.resolve();
  const auto t0 = std::chrono::steady_clock::now();
  const ImageU8 lr = read_png(lr_path);
  const ImageU8 ref = read_png(ref_path);
  const ImageU8 sr = run_pipeline(lr, ref, cfg);
  write_png(out_path, sr);
  out << "SR " << sr.height << "x" << sr.width << " from LR " << lr.height << "x" << lr.width
      << " (window " << cfg.geometry.window << ", stride " << cfg.geometry.stride << ", pad "
      << cfg.geometry.pad << ", top-u " << cfg.top_u << ") -> " << out_path << " in "
      << std::fixed << std::setprecision(1) << elapsed_ms(t0) << " ms\n";
  return kExitOk;
}

int cmd_match(const std::string& lr_path, const std::string& ref_path,
              const std::string& out_dir, const PipelineFlags& flags, std::ostream& out) {
  const PipelineConfig cfg = flags.resolve();
  const auto extractor = make_extractor(cfg.extractor, cfg.seed);
  const PipelineInputs in =
      prepare_inputs(to_tensor(read_png(lr_path)), to_tensor(read_png(ref_path)));
  const MatchStage st = match_stage(in, cfg, *extractor);
  const MatchResult& m = st.search.match;

  std::filesystem::create_directories(out_dir);
  save_tensor(std::filesystem::path(out_dir) / "H.tnsr", index_to_tensor(m.indices));
  save_tensor(std::filesystem::path(out_dir) / "S.tnsr", m.scores);

  const std::size_t nk =
      patch_count(st.key.levels[2].height(), st.key.levels[2].width(), cfg.geometry).total;
  std::array<std::size_t, 10> hist{};
  double mean0 = 0.0;
  for (std::size_t i = 0; i < m.queries(); ++i) {
    const double s = m.score(0, i);
    mean0 += s;
    const auto bin = static_cast<std::size_t>(std::clamp((s + 1.0) / 0.2, 0.0, 9.0));
    ++hist[bin];
  }
  mean0 /= static_cast<double>(m.queries());

  std::ostringstream summary;
  summary << "N_q: " << m.queries() << "\nN_k: " << nk << "\nu: " << m.top_u()
          << "\nmean S0: " << std::fixed << std::setprecision(6) << mean0
          << "\nS0 histogram:\n";
  for (std::size_t b = 0; b < hist.size(); ++b)
    summary << "  [" << std::setprecision(1) << std::showpos << -1.0 + 0.2 * b << ", "
            << -0.8 + 0.2 * b << std::noshowpos << (b + 1 == hist.size() ? "]" : ")") << " "
            << hist[b] << '\n';
  std::ofstream(std::filesystem::path(out_dir) / "summary.txt") << summary.str();
  out << summary.str();
  return kExitOk;
}

int cmd_bench(const std::vector<std::string>& dims, const std::string& configs, bool measure,
              const std::string& mem_limit, std::size_t channels, const std::string& csv_path,
              std::ostream& out) {
  BenchConfig cfg;
  for (const auto& d : dims) cfg.dims.push_back(parse_dims(d));
  cfg.geometries = parse_geometries(configs);
  cfg.measure_alloc = measure;
  cfg.mem_limit = parse_bytes(mem_limit);
  cfg.channels = channels;
  const auto rows = run_bench(cfg);
  write_table(out, rows);
  if (csv_path == "-") {
    write_csv(out, rows);
  } else if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw Error("cannot write " + csv_path);
    write_csv(f, rows);
  }
  return kExitOk;
}

int cmd_metrics(const std::string& a_path, const std::string& b_path, std::ostream& out) {
  const Tensor a = to_tensor(read_png(a_path));
  const Tensor b = to_tensor(read_png(b_path));
  const QualityScores q = evaluate_luma(a, b);
  out << "PSNR: " << format_psnr(q.psnr_db) << " dB, SSIM: " << std::fixed
      << std::setprecision(4) << q.ssim << '\n';
  return kExitOk;
}

int cmd_gd(const std::string& in_path, const std::string& out_path, std::ostream& out) {
  Tensor gd = gradient_density(to_tensor(read_png(in_path)));
  const float peak = *std::max_element(gd.data().begin(), gd.data().end());
  if (peak > 0.0f)
    for (auto& v : gd.data()) v /= peak;
  write_png(out_path, to_image(gd));
  out << "gradient density max " << peak << " -> " << out_path << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-based texture matching and super-resolution tools"};
  app.require_subcommand(1);
  app.footer(kLumaNote);

  std::string lr, ref, out_path, out_dir, a_path, b_path, in_path;
  PipelineFlags sr_flags, match_flags;

  auto* sr = app.add_subcommand("sr", "4x super-resolve an LR image using a reference");
  sr->add_option("--lr", lr, "low-resolution PNG")->required()->check(CLI::ExistingFile);
  sr->add_option("--ref", ref, "reference PNG")->required()->check(CLI::ExistingFile);
  sr->add_option("--out", out_path, "output PNG")->required();
  sr_flags.attach(sr);

  auto* match = app.add_subcommand("match", "dump the texture matches H and S as TNSR files");
  match->add_option("--lr", lr, "low-resolution PNG")->required()->check(CLI::ExistingFile);
  match->add_option("--ref", ref, "reference PNG")->required()->check(CLI::ExistingFile);
  match->add_option("--out-dir", out_dir, "directory for H.tnsr, S.tnsr, summary.txt")
      ->required();
  match_flags.attach(match);

  std::vector<std::string> dims;
  std::string configs = "3,1,1;6,2,2";
  std::string mem_limit = "24GB";
  std::string csv_path;
  bool measure = false;
  std::size_t channels = 1;
  auto* bench = app.add_subcommand("bench", "correlation-matrix size and memory per geometry");
  bench->add_option("--dims", dims, "feature map size HxW (repeatable)")->required();
  bench->add_option("--configs", configs, "geometries 'k,s,p;k,s,p'")->capture_default_str();
  bench->add_flag("--measure-alloc", measure, "build small matrices and record peak heap use");
  bench->add_option("--mem-limit", mem_limit, "memory budget; larger cells report OFM")->capture_default_str();
  bench->add_option("--channels", channels, "feature channels for measured runs")->capture_default_str();
  bench->add_option("--csv", csv_path, "write CSV to this path ('-' for stdout)");

  auto* metrics = app.add_subcommand("metrics", "PSNR / SSIM on the luma channel");
  metrics->add_option("--a", a_path, "first PNG")->required()->check(CLI::ExistingFile);
  metrics->add_option("--b", b_path, "second PNG")->required()->check(CLI::ExistingFile);
  metrics->footer(kLumaNote);

  auto* gd = app.add_subcommand("gd", "write the Sobel gradient-density map as a PNG");
  gd->add_option("--in", in_path, "input PNG")->required()->check(CLI::ExistingFile);
  gd->add_option("--out", out_path, "output PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sr) return cmd_sr(lr, ref, out_path, sr_flags, out);
    if (*match) return cmd_match(lr, ref, out_dir, match_flags, out);
    if (*bench) return cmd_bench(dims, configs, measure, mem_limit, channels, csv_path, out);
    if (*metrics) return cmd_metrics(a_path, b_path, out);
    if (*gd) return cmd_gd(in_path, out_path, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace patchxfer
