#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace patchxfer {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense float32 array. Rank-3 tensors are (channels, height, width), stored
/// channel-major and row-major within a channel.
///
/// Every dimension must be >= 1; empty tensors are rejected at construction.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  static Tensor image(std::size_t channels, std::size_t height,
                      std::size_t width, float fill = 0.0f) {
    return Tensor(Shape{channels, height, width}, fill);
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  float* raw() noexcept { return data_.data(); }
  const float* raw() const noexcept { return data_.data(); }

  float& operator[](std::size_t i) noexcept { return data_[i]; }
  float operator[](std::size_t i) const noexcept { return data_[i]; }

  // Rank-3 accessors.
  std::size_t channels() const { return dim(0); }
  std::size_t height() const { return dim(1); }
  std::size_t width() const { return dim(2); }
  float& at(std::size_t c, std::size_t y, std::size_t x) noexcept {
    return data_[(c * shape_[1] + y) * shape_[2] + x];
  }
  float at(std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return data_[(c * shape_[1] + y) * shape_[2] + x];
  }
  std::span<float> plane(std::size_t c) {
    return std::span<float>(data_).subspan(c * shape_[1] * shape_[2],
                                           shape_[1] * shape_[2]);
  }
  std::span<const float> plane(std::size_t c) const {
    return std::span<const float>(data_).subspan(c * shape_[1] * shape_[2],
                                                 shape_[1] * shape_[2]);
  }

  // Rank-2 row view.
  std::span<float> row(std::size_t r) {
    return std::span<float>(data_).subspan(r * shape_[1], shape_[1]);
  }
  std::span<const float> row(std::size_t r) const {
    return std::span<const float>(data_).subspan(r * shape_[1], shape_[1]);
  }

  Tensor reshaped(Shape shape) const;

  bool all_finite() const noexcept;

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

/// Integer companion of Tensor used for index planes.
struct IndexTensor {
  Shape shape;
  std::vector<std::int64_t> data;

  std::int64_t& operator[](std::size_t i) noexcept { return data[i]; }
  std::int64_t operator[](std::size_t i) const noexcept { return data[i]; }
  friend bool operator==(const IndexTensor&, const IndexTensor&) = default;
};

/// Throws NumericError naming `where` if any element is NaN or infinite.
void require_finite(const Tensor& t, const char* where);

/// Throws ShapeError unless `t` is rank 3.
void require_image(const Tensor& t, const char* where);

/// Channel concatenation of rank-3 tensors sharing height and width.
Tensor concat_channels(std::initializer_list<const Tensor*> parts);

Tensor add(const Tensor& a, const Tensor& b);

}  // namespace patchxfer
