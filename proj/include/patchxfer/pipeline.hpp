#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "patchxfer/features.hpp"
#include "patchxfer/image.hpp"
#include "patchxfer/matcher.hpp"
#include "patchxfer/patch.hpp"
#include "patchxfer/synthesis.hpp"

namespace patchxfer {

inline constexpr std::size_t kPipelineScale = 4;

struct PipelineConfig {
  PatchGeometry geometry{6, 2, 2};
  std::size_t top_u = 1;
  std::string extractor = "builtin-handcrafted";
  std::filesystem::path manifest;  // empty: seeded random weights
  std::uint64_t seed = 0;
};

/// Parses `key = value` lines (`#` comments) into a key/value map.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Applies recognized keys: window, stride, pad, top_u, extractor, manifest,
/// seed. Unknown keys and malformed numbers throw ParameterError.
void apply_config(const std::map<std::string, std::string>& kv, PipelineConfig& cfg);

ModelConfig model_config(const PipelineConfig& cfg);

/// Loads the manifest named by the config, or seeds random weights.
Model load_model(const PipelineConfig& cfg);

/// The three network inputs: LR upsampled 4x, the reference blurred by a
/// 4x down-up round trip, and the reference itself. The reference is cropped
/// to a multiple of 4 on each axis so its pyramid halves exactly.
struct PipelineInputs {
  Tensor lr;
  Tensor lr_up;
  Tensor ref_du;
  Tensor ref;
};
PipelineInputs prepare_inputs(const Tensor& lr, const Tensor& ref);

struct LevelTextures {
  std::array<std::vector<Tensor>, 3> maps;         // [scale][rank], folded
  std::array<std::vector<Tensor>, 3> score_maps;   // [scale][rank], (1, H, W)
};

/// Search at the deepest level, then reuse the indices at the two finer
/// levels with the window, stride and padding doubled per level.
struct MatchStage {
  FeaturePyramid query, key, value;
  SearchResult search;
  LevelTextures textures;
};
MatchStage match_stage(const PipelineInputs& in, const PipelineConfig& cfg,
                       const FeatureExtractor& extractor);

/// Every intermediate of one forward pass.
struct PipelineTrace {
  PipelineInputs inputs;
  MatchStage match;
  Tensor lr_features;                 // F at 1/4
  std::array<Tensor, 3> merged;       // F_TT per scale
  CsfiOutput integrated;
  Tensor gradient_map;                // g = GD(Lr_u)
  Tensor grad_features;               // F_g
  Tensor sr;                          // clamped to [0, 1]
};

PipelineTrace run_pipeline_traced(const Tensor& lr, const Tensor& ref, const PipelineConfig& cfg,
                                  const Model& model, const FeatureExtractor& extractor);

ImageU8 run_pipeline(const ImageU8& lr, const ImageU8& ref, const PipelineConfig& cfg);

}  // namespace patchxfer
