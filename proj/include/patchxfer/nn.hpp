#pragma once

#include <cstddef>
#include <span>

#include "patchxfer/tensor.hpp"

namespace patchxfer {

/// 3x3 convolution layer: weight (C_out, C_in, 3, 3), bias (C_out).
struct ConvParams {
  Tensor weight;
  Tensor bias;

  std::size_t out_channels() const { return weight.dim(0); }
  std::size_t in_channels() const { return weight.dim(1); }

  /// Throws ShapeError unless the shapes describe a 3x3 layer.
  void validate() const;
};

/// Cross-correlation with zero padding 1. Stride 1 preserves the spatial
/// shape; stride 2 gives ceil(H / 2) x ceil(W / 2).
Tensor conv3x3_forward(const Tensor& x, const ConvParams& p, std::size_t stride = 1);

Tensor relu(Tensor x);

struct ResidualBlockParams {
  ConvParams conv1;
  ConvParams conv2;
};

/// x + conv2(relu(conv1(x))).
Tensor residual_block(const Tensor& x, const ResidualBlockParams& p);

/// Applies the blocks in order.
Tensor residual_chain(Tensor x, std::span<const ResidualBlockParams> blocks);

}  // namespace patchxfer
