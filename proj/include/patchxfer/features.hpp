#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "patchxfer/tensor.hpp"

namespace patchxfer {

inline constexpr std::array<std::size_t, 3> kPyramidChannels = {64, 128, 256};

/// Three feature maps at 1, 1/2 and 1/4 of the input resolution.
struct FeaturePyramid {
  std::array<Tensor, 3> levels;
};

/// Spatial size of pyramid level `level` for an input of extent n: each level
/// halves the previous one, rounding halves up.
std::size_t pyramid_extent(std::size_t n, std::size_t level);

/// Throws ShapeError unless every level has the listed channel count and the
/// halving spatial sizes of a height x width input.
void validate_pyramid(const FeaturePyramid& p, std::size_t height, std::size_t width);

/// Which of the three pipeline inputs an image is. File-backed extractors use
/// it to pick the dump to load.
enum class ImageRole { LrUp, RefDownUp, Ref };
const char* role_name(ImageRole role);

class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual FeaturePyramid extract(const Tensor& image, ImageRole role) const = 0;
  virtual std::string id() const = 0;
};

/// Extractor ids:
///   builtin-random       seeded random linear 3x3 projections per level
///   builtin-handcrafted  RGB, Sobel responses and gradient density of the
///                        image resampled to each level, zero-filled to width
///   file:<dir>           loads <dir>/<role>_l{1,2,3}.tnsr
std::unique_ptr<FeatureExtractor> make_extractor(const std::string& id, std::uint64_t seed);

/// Writes a pyramid in the layout the file extractor reads.
void save_pyramid(const std::filesystem::path& dir, ImageRole role, const FeaturePyramid& p);

}  // namespace patchxfer
