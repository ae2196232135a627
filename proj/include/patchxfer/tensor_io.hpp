#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "patchxfer/tensor.hpp"

namespace patchxfer {

// "TNSR v1" layout, no padding:
//   magic "TNSR" | u32 version = 1 | u8 dtype (0 = f32) | u8 rank |
//   rank x u64 dims | payload
// All integers and the payload are little-endian.

inline constexpr std::uint32_t kTensorFormatVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 0;

std::vector<std::uint8_t> serialize_tensor(const Tensor& t);
Tensor deserialize_tensor(std::span<const std::uint8_t> bytes);

void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

/// Index planes are stored as f32; values must stay below 2^24 to be exact.
Tensor index_to_tensor(const IndexTensor& idx);
IndexTensor tensor_to_index(const Tensor& t);

}  // namespace patchxfer
