#include "patchxfer/synthesis.hpp"

#include <string>

#include "patchxfer/error.hpp"
#include "patchxfer/resample.hpp"

namespace patchxfer {

namespace {

// Walks the model structure in a fixed order, asking `make` for each layer.
// Both the layer listing and weight assembly go through here so the two can
// never disagree.
template <typename Make>
Model assemble(const ModelConfig& cfg, Make&& make) {
  if (cfg.top_u < 1) throw ParameterError("model: top_u must be >= 1");
  const std::size_t F = cfg.features;
  auto blocks = [&](const std::string& prefix, std::size_t n) {
    std::vector<ResidualBlockParams> out;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string rb = prefix + ".rb" + std::to_string(i);
      ResidualBlockParams b;
      b.conv1 = make(rb + ".conv1", F, F);
      b.conv2 = make(rb + ".conv2", F, F);
      out.push_back(std::move(b));
    }
    return out;
  };
  auto trunk = [&](const std::string& prefix, std::size_t n) {
    Trunk t;
    t.blocks = blocks(prefix, n);
    t.tail = make(prefix + ".tail", F, F);
    return t;
  };

  Model m;
  m.config = cfg;
  m.ife_head = make("ife.head", F, 3);
  m.ife_blocks = blocks("ife", cfg.ife_blocks);
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t r = 0; r < cfg.top_u; ++r)
      m.merge[s].push_back(make("merge.s" + std::to_string(s) + ".t" + std::to_string(r), F,
                                F + cfg.texture_channels[s]));

  CsfiParams& c = m.csfi;
  c.a3 = trunk("csfi.a3", cfg.csfi_depths[0]);
  c.b_ex2 = make("csfi.b.ex2", F, 2 * F);
  c.b_down21 = make("csfi.b.down21", F, F);
  c.b_ex3 = make("csfi.b.ex3", F, 2 * F);
  c.b2 = trunk("csfi.b2", cfg.csfi_depths[1]);
  c.b3 = trunk("csfi.b3", cfg.csfi_depths[1]);
  c.c_ex1 = make("csfi.c.ex1", F, 3 * F);
  c.c_down12 = make("csfi.c.down12", F, F);
  c.c_ex2 = make("csfi.c.ex2", F, 3 * F);
  c.c_down23 = make("csfi.c.down23", F, F);
  c.c_down13a = make("csfi.c.down13a", F, F);
  c.c_down13b = make("csfi.c.down13b", F, F);
  c.c_ex3 = make("csfi.c.ex3", F, 3 * F);
  c.c1 = trunk("csfi.c1", cfg.csfi_depths[2]);
  c.c2 = trunk("csfi.c2", cfg.csfi_depths[2]);
  c.c3 = trunk("csfi.c3", cfg.csfi_depths[2]);
  c.merge = make("csfi.merge", F, 3 * F);

  m.gfe.head = make("gfe.head", F, 3);
  m.gfe.down1 = make("gfe.down1", F, F);
  m.gfe.down2 = make("gfe.down2", F, F);
  m.gfe.blocks = blocks("gfe", cfg.gfe_blocks);

  for (std::size_t i = 0; i < 3; ++i) {
    const std::string prefix = "gde.x" + std::to_string(i + 1);
    m.gde.fuse[i] = make(prefix + ".fuse", F, 2 * F);
    m.gde.blocks[i] = blocks(prefix, cfg.gde_depths[i]);
  }
  m.gde.out = make("gde.out", 3, 2 * F);
  return m;
}

Tensor multiply_broadcast(const Tensor& x, const Tensor& scale) {
  if (scale.channels() != 1 || scale.height() != x.height() || scale.width() != x.width())
    throw ShapeError("score map " + shape_string(scale.shape()) + " does not cover " +
                     shape_string(x.shape()));
  Tensor out = x;
  const auto s = scale.plane(0);
  for (std::size_t c = 0; c < out.channels(); ++c) {
    auto p = out.plane(c);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] *= s[i];
  }
  return out;
}

Tensor down2(const Tensor& x, const ConvParams& p) { return conv3x3_forward(x, p, 2); }

// x + conv(concat(parts...)).
Tensor exchange(const Tensor& x, std::initializer_list<const Tensor*> parts, const ConvParams& p) {
  return add(x, conv3x3_forward(concat_channels(parts), p));
}

}  // namespace

Tensor apply_trunk(const Tensor& x, const Trunk& t) {
  return add(x, conv3x3_forward(residual_chain(x, t.blocks), t.tail));
}

std::vector<LayerSpec> model_layers(const ModelConfig& config) {
  std::vector<LayerSpec> specs;
  assemble(config, [&](const std::string& name, std::size_t out, std::size_t in) {
    specs.push_back({name, out, in});
    return ConvParams{};
  });
  return specs;
}

Model build_model(const WeightManifest& weights, const ModelConfig& config) {
  weights.validate(model_layers(config));
  return assemble(config, [&](const std::string& name, std::size_t, std::size_t) {
    return weights.at(name);
  });
}

Model random_model(const ModelConfig& config, std::uint64_t seed) {
  return build_model(WeightManifest::random(model_layers(config), seed), config);
}

Tensor upsample2(const Tensor& t) { return bicubic_resize(t, ScaleSpec::up(2)); }

Tensor initial_features(const Tensor& lr, const Model& m) {
  return residual_chain(conv3x3_forward(lr, m.ife_head), m.ife_blocks);
}

Tensor score_map(const MatchResult& match, std::size_t rank, const PatchCount& grid,
                 std::size_t height, std::size_t width) {
  if (rank >= match.top_u()) throw ParameterError("score_map: rank out of range");
  if (grid.total != match.queries())
    throw ShapeError("score_map: grid has " + std::to_string(grid.total) +
                     " cells, match has " + std::to_string(match.queries()) + " queries");
  Tensor cells = Tensor::image(1, grid.rows, grid.cols);
  for (std::size_t i = 0; i < grid.total; ++i) cells[i] = match.score(rank, i);
  return bilinear_resize_to(cells, height, width);
}

Tensor merge_ftt(const Tensor& features, std::span<const Tensor> textures,
                 std::span<const Tensor> score_maps, std::span<const ConvParams> convs) {
  require_image(features, "merge_ftt");
  if (textures.size() != score_maps.size() || textures.size() > convs.size())
    throw ShapeError("merge_ftt: " + std::to_string(textures.size()) + " textures, " +
                     std::to_string(score_maps.size()) + " score maps, " +
                     std::to_string(convs.size()) + " convs");
  Tensor out = features;
  for (std::size_t i = 0; i < textures.size(); ++i) {
    const Tensor weighted = multiply_broadcast(textures[i], score_maps[i]);
    const Tensor branch = conv3x3_forward(concat_channels({&features, &weighted}), convs[i]);
    out = add(out, multiply_broadcast(branch, score_maps[i]));
  }
  return out;
}

CsfiOutput csfi(const std::array<Tensor, 3>& merged, const CsfiParams& p) {
  const Tensor& f1 = merged[0];
  const Tensor& f2 = merged[1];
  const Tensor& f3 = merged[2];
  for (std::size_t s = 1; s < 3; ++s)
    if (ScaleSpec::up(2).apply(merged[s].height()) != merged[s - 1].height() ||
        ScaleSpec::up(2).apply(merged[s].width()) != merged[s - 1].width())
      throw ShapeError("csfi: scale " + std::to_string(s) + " map " +
                       shape_string(merged[s].shape()) + " is not half of " +
                       shape_string(merged[s - 1].shape()));

  // Single-scale trunk at 1/4.
  const Tensor a3 = apply_trunk(f3, p.a3);

  // Two-scale exchange.
  const Tensor a3_up = upsample2(a3);
  const Tensor f2_down = down2(f2, p.b_down21);
  const Tensor b2 = apply_trunk(exchange(f2, {&f2, &a3_up}, p.b_ex2), p.b2);
  const Tensor b3 = apply_trunk(exchange(a3, {&a3, &f2_down}, p.b_ex3), p.b3);

  // Three-scale exchange.
  const Tensor b2_up = upsample2(b2);
  const Tensor b3_up = upsample2(b3);
  const Tensor b3_up4 = upsample2(b3_up);
  const Tensor f1_down = down2(f1, p.c_down12);
  const Tensor b2_down = down2(b2, p.c_down23);
  const Tensor f1_down4 = down2(down2(f1, p.c_down13a), p.c_down13b);
  const Tensor c1 = apply_trunk(exchange(f1, {&f1, &b2_up, &b3_up4}, p.c_ex1), p.c1);
  const Tensor c2 = apply_trunk(exchange(b2, {&b2, &b3_up, &f1_down}, p.c_ex2), p.c2);
  const Tensor c3 = apply_trunk(exchange(b3, {&b3, &b2_down, &f1_down4}, p.c_ex3), p.c3);

  const Tensor c2_up = upsample2(c2);
  const Tensor c3_up4 = upsample2(upsample2(c3));
  CsfiOutput out;
  out.x_tt = exchange(c1, {&c1, &c2_up, &c3_up4}, p.merge);
  out.textures = {c1, c2, c3};
  return out;
}

Tensor grad_feature_extractor(const Tensor& gradient_map, const GfeParams& p) {
  const Tensor head = conv3x3_forward(gradient_map, p.head);
  return residual_chain(down2(down2(head, p.down1), p.down2), p.blocks);
}

Tensor gde_merge(const Tensor& grad_features, const Tensor& x_tt, const Tensor& t1,
                 const Tensor& t2, const Tensor& t3, const GdeParams& p) {
  const Tensor x1 =
      residual_chain(conv3x3_forward(concat_channels({&grad_features, &t3}), p.fuse[0]), p.blocks[0]);
  const Tensor x1_up = upsample2(x1);
  const Tensor x2 = residual_chain(conv3x3_forward(concat_channels({&x1_up, &t2}), p.fuse[1]), p.blocks[1]);
  const Tensor x2_up = upsample2(x2);
  const Tensor x3 = residual_chain(conv3x3_forward(concat_channels({&x2_up, &t1}), p.fuse[2]), p.blocks[2]);
  return conv3x3_forward(concat_channels({&x3, &x_tt}), p.out);
}

}  // namespace patchxfer
