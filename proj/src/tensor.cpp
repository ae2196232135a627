#include "patchxfer/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "patchxfer/error.hpp"

namespace patchxfer {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor rank must be at least 1");
  for (auto d : shape)
    if (d == 0)
      throw ShapeError("zero-sized dimension in shape " + shape_string(shape));
}

}  // namespace

Tensor::Tensor(Shape shape, float fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_numel(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (data_.size() != shape_numel(shape_))
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string(shape_));
}

Tensor Tensor::reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

void require_finite(const Tensor& t, const char* where) {
  if (!t.all_finite())
    throw NumericError(std::string(where) + ": non-finite value in output");
}

void require_image(const Tensor& t, const char* where) {
  if (t.rank() != 3)
    throw ShapeError(std::string(where) + ": expected (C, H, W), got " +
                     shape_string(t.shape()));
}

Tensor concat_channels(std::initializer_list<const Tensor*> parts) {
  if (parts.size() == 0) throw ShapeError("concat: no inputs");
  const Tensor& first = **parts.begin();
  require_image(first, "concat");
  std::size_t channels = 0;
  for (const Tensor* p : parts) {
    require_image(*p, "concat");
    if (p->height() != first.height() || p->width() != first.width())
      throw ShapeError("concat: spatial mismatch " + shape_string(p->shape()) +
                       " vs " + shape_string(first.shape()));
    channels += p->channels();
  }
  Tensor out = Tensor::image(channels, first.height(), first.width());
  auto dst = out.data().begin();
  for (const Tensor* p : parts) dst = std::copy(p->data().begin(), p->data().end(), dst);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw ShapeError("add: " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

}  // namespace patchxfer
