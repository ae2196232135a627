#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "patchxfer/tensor.hpp"

namespace patchxfer {

/// 8-bit RGB image, pixels interleaved row by row.
struct ImageU8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  friend bool operator==(const ImageU8&, const ImageU8&) = default;
};

/// Decodes an 8-bit, non-interlaced grayscale or RGB PNG. Grayscale is
/// replicated to three channels. Errors carry the byte offset of the fault.
ImageU8 decode_png(std::span<const std::uint8_t> bytes);

/// Encodes an RGB PNG (filter type 0 on every row).
std::vector<std::uint8_t> encode_png(const ImageU8& img);

ImageU8 read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageU8& img);

/// (3, H, W) tensor with values v / 255.
Tensor to_tensor(const ImageU8& img);

/// Inverse of to_tensor: clamps to [0, 1], scales by 255, rounds to nearest.
/// Single-channel tensors are written as gray.
ImageU8 to_image(const Tensor& t);

/// Full-range BT.601 luma: Y = 0.299 R + 0.587 G + 0.114 B.
Tensor to_luma_bt601(const Tensor& rgb);

}  // namespace patchxfer
