#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "patchxfer/nn.hpp"

namespace patchxfer {

struct LayerSpec {
  std::string name;
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
};

/// Named 3x3 convolution layers.
///
/// On disk a manifest is a text file of `name = relative/path.tnsr` lines,
/// one per tensor, where name is `<layer>.weight` or `<layer>.bias` and paths
/// are relative to the manifest's directory. `#` starts a comment.
class WeightManifest {
 public:
  const ConvParams& at(const std::string& layer) const;
  bool contains(const std::string& layer) const { return layers_.count(layer) != 0; }
  std::size_t size() const { return layers_.size(); }
  void set(const std::string& layer, ConvParams params);

  const std::map<std::string, ConvParams>& layers() const { return layers_; }

  /// Every spec present with matching channel counts; throws FormatError
  /// naming the first offending layer.
  void validate(const std::vector<LayerSpec>& specs) const;

  /// Uniform weights and biases in [-0.1, 0.1] from a 64-bit Mersenne
  /// Twister seeded with `seed`, drawn in spec order.
  static WeightManifest random(const std::vector<LayerSpec>& specs, std::uint64_t seed);

  static WeightManifest load(const std::filesystem::path& manifest_path);

  /// Writes one TNSR file per tensor next to the manifest.
  void save(const std::filesystem::path& manifest_path) const;

 private:
  std::map<std::string, ConvParams> layers_;
};

/// Uniform floats in [lo, hi) built from raw std::mt19937_64 bits. The engine
/// sequence is fixed by the standard, the distributions are not.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  float next(float lo, float hi) {
    const double unit = static_cast<double>(engine_() >> 40) * 0x1.0p-24;
    return static_cast<float>(lo + (hi - lo) * unit);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace patchxfer
