#include "patchxfer/nn.hpp"

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "patchxfer/error.hpp"
#include "patchxfer/parallel.hpp"

namespace patchxfer {

namespace {

// Register tile: kCoBlock output channels x kXBlock output columns. Every
// output element still sums bias, then (ci, ky, kx) in order, one rounding
// per step, so results match a plain sequential loop bit for bit.
constexpr std::size_t kCoBlock = 8;
constexpr std::size_t kXBlock = 8;

// Four-lane float vector (GCC/Clang extension); lanes are independent output
// columns, so vectorising changes nothing numerically.
typedef float v4f __attribute__((vector_size(16)));
constexpr std::size_t kLanes = 4;
constexpr std::size_t kXVecs = kXBlock / kLanes;

inline v4f load4(const float* p) {
  v4f v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

// Zero-padded input split into column phases: for stride 1 a single phase
// holding the padded rows; for stride 2 the even and odd padded columns.
struct PaddedInput {
  std::size_t channels = 0, rows = 0, cols = 0, stride = 1;
  std::vector<float> phase[2];

  const float* row(std::size_t ph, std::size_t ci, std::size_t r) const {
    return phase[ph].data() + (ci * rows + r) * cols;
  }
};

PaddedInput pad_input(const Tensor& x, std::size_t stride) {
  const std::size_t C = x.channels(), H = x.height(), W = x.width();
  PaddedInput p;
  p.channels = C;
  p.rows = H + 2;
  p.stride = stride;
  // Enough columns for a full trailing tile plus the kx reach.
  const std::size_t Wo = (W - 1) / stride + 1;
  p.cols = (Wo + kXBlock - 1) / kXBlock * kXBlock + 2;
  for (std::size_t ph = 0; ph < stride; ++ph) p.phase[ph].assign(C * p.rows * p.cols, 0.0f);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t y = 0; y < H; ++y) {
      const float* src = x.raw() + (c * H + y) * W;
      for (std::size_t xx = 0; xx < W; ++xx) {
        const std::size_t px = xx + 1;  // column in the padded row
        p.phase[px % stride][(c * p.rows + y + 1) * p.cols + px / stride] = src[xx];
      }
    }
  return p;
}

template <std::size_t Stride>
void conv_tiled(const PaddedInput& in, const ConvParams& p, Tensor& out) {
  const std::size_t Ci = in.channels, Co = p.out_channels();
  const std::size_t Ho = out.height(), Wo = out.width();
  const float* wt = p.weight.raw();
  const std::size_t blocks = (Co + kCoBlock - 1) / kCoBlock;

  parallel_for(blocks, [&](std::size_t b0, std::size_t b1) {
    std::vector<v4f> wpack(Ci * 9 * kCoBlock);
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t co0 = b * kCoBlock;
      const std::size_t nco = std::min(kCoBlock, Co - co0);
      // Weights broadcast and interleaved as [ci][ky][kx][j]; missing
      // channels get 0.
      for (std::size_t ci = 0; ci < Ci; ++ci)
        for (std::size_t k = 0; k < 9; ++k)
          for (std::size_t j = 0; j < kCoBlock; ++j) {
            const float v = j < nco ? wt[((co0 + j) * Ci + ci) * 9 + k] : 0.0f;
            wpack[(ci * 9 + k) * kCoBlock + j] = v4f{v, v, v, v};
          }

      for (std::size_t y = 0; y < Ho; ++y)
        for (std::size_t x0 = 0; x0 < Wo; x0 += kXBlock) {
          v4f acc[kCoBlock][kXVecs];
          for (std::size_t j = 0; j < kCoBlock; ++j) {
            const float b = j < nco ? p.bias[co0 + j] : 0.0f;
            for (std::size_t v = 0; v < kXVecs; ++v) acc[j][v] = v4f{b, b, b, b};
          }
          const v4f* w = wpack.data();
          for (std::size_t ci = 0; ci < Ci; ++ci)
            for (std::size_t ky = 0; ky < 3; ++ky) {
              const std::size_t r = y * Stride + ky;
              for (std::size_t kx = 0; kx < 3; ++kx, w += kCoBlock) {
                // Padded column x0*Stride + kx + t*Stride lives in phase
                // kx % Stride at offset x0 + kx / Stride + t.
                const float* src = in.row(kx % Stride, ci, r) + x0 + kx / Stride;
                v4f sv[kXVecs];
                for (std::size_t v = 0; v < kXVecs; ++v) sv[v] = load4(src + v * kLanes);
                for (std::size_t j = 0; j < kCoBlock; ++j)
                  for (std::size_t v = 0; v < kXVecs; ++v) acc[j][v] += w[j] * sv[v];
              }
            }
          const std::size_t nx = std::min(kXBlock, Wo - x0);
          for (std::size_t j = 0; j < nco; ++j) {
            float lane[kXBlock];
            std::memcpy(lane, acc[j], sizeof lane);
            std::copy_n(lane, nx, out.raw() + ((co0 + j) * Ho + y) * Wo + x0);
          }
        }
    }
  });
}

}  // namespace

void ConvParams::validate() const {
  if (weight.rank() != 4 || weight.dim(2) != 3 || weight.dim(3) != 3)
    throw ShapeError("conv weight must be (C_out, C_in, 3, 3), got " +
                     shape_string(weight.shape()));
  if (bias.rank() != 1 || bias.dim(0) != weight.dim(0))
    throw ShapeError("conv bias " + shape_string(bias.shape()) + " does not match weight " +
                     shape_string(weight.shape()));
}

Tensor conv3x3_forward(const Tensor& x, const ConvParams& p, std::size_t stride) {
  require_image(x, "conv3x3");
  p.validate();
  if (x.channels() != p.in_channels())
    throw ShapeError("conv3x3: input has " + std::to_string(x.channels()) +
                     " channels, layer expects " + std::to_string(p.in_channels()));
  if (stride != 1 && stride != 2) throw ParameterError("conv3x3: stride must be 1 or 2");
  const std::size_t Ho = (x.height() - 1) / stride + 1;
  const std::size_t Wo = (x.width() - 1) / stride + 1;
  Tensor out = Tensor::image(p.out_channels(), Ho, Wo);
  const PaddedInput padded = pad_input(x, stride);
  if (stride == 1)
    conv_tiled<1>(padded, p, out);
  else
    conv_tiled<2>(padded, p, out);
  return out;
}

Tensor relu(Tensor x) {
  for (auto& v : x.data()) v = v > 0.0f ? v : 0.0f;
  return x;
}

Tensor residual_block(const Tensor& x, const ResidualBlockParams& p) {
  const Tensor branch = conv3x3_forward(relu(conv3x3_forward(x, p.conv1)), p.conv2);
  return add(x, branch);
}

Tensor residual_chain(Tensor x, std::span<const ResidualBlockParams> blocks) {
  for (const auto& b : blocks) x = residual_block(x, b);
  return x;
}

}  // namespace patchxfer
