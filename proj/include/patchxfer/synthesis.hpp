#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "patchxfer/features.hpp"
#include "patchxfer/matcher.hpp"
#include "patchxfer/nn.hpp"
#include "patchxfer/weights.hpp"

namespace patchxfer {

/// Network widths and depths. Scale index 0 is full resolution, 1 is 1/2,
/// 2 is 1/4.
struct ModelConfig {
  std::size_t features = 64;
  std::array<std::size_t, 3> texture_channels = kPyramidChannels;
  std::size_t top_u = 1;
  std::size_t ife_blocks = 4;
  std::array<std::size_t, 3> csfi_depths = {16, 8, 4};
  std::array<std::size_t, 3> gde_depths = {9, 9, 9};
  std::size_t gfe_blocks = 4;
};

/// Residual trunk: x + tail(blocks(x)).
struct Trunk {
  std::vector<ResidualBlockParams> blocks;
  ConvParams tail;
};
Tensor apply_trunk(const Tensor& x, const Trunk& t);

struct CsfiParams {
  Trunk a3;                       // 1/4 scale, depth csfi_depths[0]
  ConvParams b_ex2, b_down21, b_ex3;
  Trunk b2, b3;                   // depth csfi_depths[1]
  ConvParams c_ex1, c_down12, c_ex2, c_down23, c_down13a, c_down13b, c_ex3;
  Trunk c1, c2, c3;               // depth csfi_depths[2]
  ConvParams merge;
};

struct GfeParams {
  ConvParams head;
  ConvParams down1, down2;  // stride 2
  std::vector<ResidualBlockParams> blocks;
};

struct GdeParams {
  std::array<ConvParams, 3> fuse;
  std::array<std::vector<ResidualBlockParams>, 3> blocks;
  ConvParams out;
};

struct Model {
  ModelConfig config;
  ConvParams ife_head;
  std::vector<ResidualBlockParams> ife_blocks;
  std::array<std::vector<ConvParams>, 3> merge;  // [scale][texture rank]
  CsfiParams csfi;
  GfeParams gfe;
  GdeParams gde;
};

/// Every convolution layer the model needs, in a fixed order.
std::vector<LayerSpec> model_layers(const ModelConfig& config);

/// Validates the manifest against model_layers and assembles the model.
Model build_model(const WeightManifest& weights, const ModelConfig& config);

/// Seeded uniform [-0.1, 0.1] initialization of every layer.
Model random_model(const ModelConfig& config, std::uint64_t seed);

/// Initial feature extractor on the LR image: head conv then residual blocks.
Tensor initial_features(const Tensor& lr, const Model& m);

/// Per-patch scores of texture rank `rank` spread over a height x width map
/// (1, H, W): the scores sit on the patch-origin grid and are bilinearly
/// resampled to pixel resolution.
Tensor score_map(const MatchResult& match, std::size_t rank, const PatchCount& grid,
                 std::size_t height, std::size_t width);

/// F + sum_i Conv_i(Concat(F, T_i * S_i)) * S_i, with S_i broadcast over
/// channels.
Tensor merge_ftt(const Tensor& features, std::span<const Tensor> textures,
                 std::span<const Tensor> score_maps, std::span<const ConvParams> convs);

struct CsfiOutput {
  Tensor x_tt;                  // full scale
  std::array<Tensor, 3> textures;  // T_1 full, T_2 1/2, T_3 1/4
};

/// Cross-scale integration of the merged maps (full, 1/2, 1/4). Every
/// exchange and trunk is residual, so all-zero weights return the inputs.
CsfiOutput csfi(const std::array<Tensor, 3>& merged, const CsfiParams& p);

/// Gradient feature extractor: head conv, two stride-2 convs, residual blocks.
/// Output is at 1/4 of the input resolution.
Tensor grad_feature_extractor(const Tensor& gradient_map, const GfeParams& p);

/// Coarse-to-fine decoder:
///   x1 = RB1(Conv(Concat(F_g, T_3)))
///   x2 = RB2(Conv(Concat(up2(x1), T_2)))
///   x3 = RB3(Conv(Concat(up2(x2), T_1)))
///   SR = Conv(Concat(x3, x_TT))
Tensor gde_merge(const Tensor& grad_features, const Tensor& x_tt, const Tensor& t1,
                 const Tensor& t2, const Tensor& t3, const GdeParams& p);

/// 2x bicubic upsampling.
Tensor upsample2(const Tensor& t);

}  // namespace patchxfer
