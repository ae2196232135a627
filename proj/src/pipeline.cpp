#include "patchxfer/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "patchxfer/error.hpp"
#include "patchxfer/gradient.hpp"
#include "patchxfer/resample.hpp"

namespace patchxfer {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ParameterError("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
  return out;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

Tensor crop(const Tensor& t, std::size_t height, std::size_t width) {
  if (t.height() == height && t.width() == width) return t;
  Tensor out = Tensor::image(t.channels(), height, width);
  for (std::size_t c = 0; c < t.channels(); ++c)
    for (std::size_t y = 0; y < height; ++y)
      std::copy_n(t.raw() + (c * t.height() + y) * t.width(), width,
                  out.raw() + (c * height + y) * width);
  return out;
}

Tensor clamp_unit(Tensor t) {
  for (auto& v : t.data()) v = std::clamp(v, 0.0f, 1.0f);
  return t;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError(path.string() + ":" + std::to_string(lineno) +
                           ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_config(const std::map<std::string, std::string>& kv, PipelineConfig& cfg) {
  for (const auto& [key, value] : kv) {
    if (key == "window") cfg.geometry.window = parse_number<std::size_t>(key, value);
    else if (key == "stride") cfg.geometry.stride = parse_number<std::size_t>(key, value);
    else if (key == "pad") cfg.geometry.pad = parse_number<std::size_t>(key, value);
    else if (key == "top_u") cfg.top_u = parse_number<std::size_t>(key, value);
    else if (key == "extractor") cfg.extractor = value;
    else if (key == "manifest") cfg.manifest = value;
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else throw ParameterError("config: unknown key '" + key + "'");
  }
}

ModelConfig model_config(const PipelineConfig& cfg) {
  ModelConfig m;
  m.top_u = cfg.top_u;
  return m;
}

Model load_model(const PipelineConfig& cfg) {
  const ModelConfig mc = model_config(cfg);
  if (cfg.manifest.empty()) return random_model(mc, cfg.seed);
  return build_model(WeightManifest::load(cfg.manifest), mc);
}

PipelineInputs prepare_inputs(const Tensor& lr, const Tensor& ref) {
  require_image(lr, "prepare_inputs");
  require_image(ref, "prepare_inputs");
  const std::size_t rh = ref.height() / kPipelineScale * kPipelineScale;
  const std::size_t rw = ref.width() / kPipelineScale * kPipelineScale;
  if (rh == 0 || rw == 0)
    throw ShapeError("reference " + shape_string(ref.shape()) + " is smaller than 4x4");
  PipelineInputs in;
  in.lr = lr;
  in.lr_up = bicubic_resize(lr, ScaleSpec::up(kPipelineScale));
  in.ref = crop(ref, rh, rw);
  in.ref_du = down_up(in.ref, kPipelineScale);
  return in;
}

MatchStage match_stage(const PipelineInputs& in, const PipelineConfig& cfg,
                       const FeatureExtractor& extractor) {
  MatchStage st;
  stage("features", [&] {
    st.query = extractor.extract(in.lr_up, ImageRole::LrUp);
    st.key = extractor.extract(in.ref_du, ImageRole::RefDownUp);
    st.value = extractor.extract(in.ref, ImageRole::Ref);
    validate_pyramid(st.query, in.lr_up.height(), in.lr_up.width());
    validate_pyramid(st.key, in.ref_du.height(), in.ref_du.width());
    validate_pyramid(st.value, in.ref.height(), in.ref.width());
    for (const auto* p : {&st.query, &st.key, &st.value})
      for (const auto& l : p->levels) require_finite(l, "features");
  });

  stage("search", [&] {
    st.search = two_stage_search(st.query.levels[2], st.key.levels[2], st.value.levels[2],
                                 cfg.geometry, cfg.top_u);
    for (std::size_t s = 0; s < 3; ++s) {
      const std::size_t factor = std::size_t{1} << (2 - s);
      const PatchGeometry g = cfg.geometry.scaled(factor);
      const Tensor& q = st.query.levels[s];
      const Tensor& k = st.key.levels[s];
      const TextureStack stack =
          s == 2 ? st.search.textures
                 : transfer_textures(st.value.levels[s], k.height(), k.width(), g,
                                     st.search.match, q.height(), q.width());
      const PatchCount grid = patch_count(q.height(), q.width(), g);
      for (std::size_t r = 0; r < cfg.top_u; ++r) {
        st.textures.maps[s].push_back(fold(stack.textures[r]));
        st.textures.score_maps[s].push_back(
            score_map(st.search.match, r, grid, q.height(), q.width()));
      }
    }
  });
  return st;
}

PipelineTrace run_pipeline_traced(const Tensor& lr, const Tensor& ref, const PipelineConfig& cfg,
                                  const Model& model, const FeatureExtractor& extractor) {
  if (model.config.top_u != cfg.top_u)
    throw StageError("model", "model was built for top_u = " +
                                  std::to_string(model.config.top_u) + ", config asks for " +
                                  std::to_string(cfg.top_u));
  PipelineTrace tr;
  tr.inputs = stage("resample", [&] { return prepare_inputs(lr, ref); });
  tr.match = match_stage(tr.inputs, cfg, extractor);

  stage("merge", [&] {
    tr.lr_features = initial_features(tr.inputs.lr, model);
    for (std::size_t s = 0; s < 3; ++s) {
      const Tensor& q = tr.match.query.levels[s];
      const Tensor f = bicubic_resize_to(tr.lr_features, q.height(), q.width());
      tr.merged[s] = merge_ftt(f, tr.match.textures.maps[s], tr.match.textures.score_maps[s],
                               model.merge[s]);
      require_finite(tr.merged[s], "merge");
    }
  });

  stage("csfi", [&] {
    tr.integrated = csfi(tr.merged, model.csfi);
    require_finite(tr.integrated.x_tt, "csfi");
  });

  stage("gradient", [&] {
    tr.gradient_map = gradient_density(tr.inputs.lr_up);
    tr.grad_features = grad_feature_extractor(tr.gradient_map, model.gfe);
    require_finite(tr.grad_features, "gradient");
  });

  stage("gde", [&] {
    const auto& t = tr.integrated.textures;
    const Tensor raw = gde_merge(tr.grad_features, tr.integrated.x_tt, t[0], t[1], t[2], model.gde);
    require_finite(raw, "gde");
    tr.sr = clamp_unit(raw);
  });
  return tr;
}

ImageU8 run_pipeline(const ImageU8& lr, const ImageU8& ref, const PipelineConfig& cfg) {
  const Model model = stage("model", [&] { return load_model(cfg); });
  const auto extractor = stage("features", [&] { return make_extractor(cfg.extractor, cfg.seed); });
  const PipelineTrace tr =
      run_pipeline_traced(to_tensor(lr), to_tensor(ref), cfg, model, *extractor);
  return to_image(tr.sr);
}

}  // namespace patchxfer
