#include "patchxfer/features.hpp"

#include <algorithm>

#include "patchxfer/error.hpp"
#include "patchxfer/gradient.hpp"
#include "patchxfer/nn.hpp"
#include "patchxfer/resample.hpp"
#include "patchxfer/tensor_io.hpp"
#include "patchxfer/weights.hpp"

namespace patchxfer {

std::size_t pyramid_extent(std::size_t n, std::size_t level) {
  for (std::size_t i = 0; i < level; ++i) n = ScaleSpec::down(2).apply(n);
  return n;
}

void validate_pyramid(const FeaturePyramid& p, std::size_t height, std::size_t width) {
  for (std::size_t i = 0; i < 3; ++i) {
    const Tensor& t = p.levels[i];
    const Shape want{kPyramidChannels[i], pyramid_extent(height, i), pyramid_extent(width, i)};
    if (t.shape() != want)
      throw ShapeError("feature level " + std::to_string(i + 1) + " has shape " +
                       shape_string(t.shape()) + ", expected " + shape_string(want));
  }
}

const char* role_name(ImageRole role) {
  switch (role) {
    case ImageRole::LrUp: return "lr_up";
    case ImageRole::RefDownUp: return "ref_du";
    case ImageRole::Ref: return "ref";
  }
  return "?";
}

namespace {

class RandomProjectionExtractor final : public FeatureExtractor {
 public:
  explicit RandomProjectionExtractor(std::uint64_t seed) {
    UniformSource rng(seed);
    std::size_t in = 3;
    for (std::size_t i = 0; i < 3; ++i) {
      const std::size_t out = kPyramidChannels[i];
      ConvParams p{Tensor(Shape{out, in, 3, 3}), Tensor(Shape{out})};
      for (auto& v : p.weight.data()) v = rng.next(-0.1f, 0.1f);
      for (auto& v : p.bias.data()) v = rng.next(-0.1f, 0.1f);
      layers_[i] = std::move(p);
      in = out;
    }
  }

  FeaturePyramid extract(const Tensor& image, ImageRole) const override {
    require_image(image, "builtin-random");
    FeaturePyramid p;
    Tensor x = image;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i > 0)
        x = bicubic_resize_to(x, ScaleSpec::down(2).apply(x.height()),
                              ScaleSpec::down(2).apply(x.width()));
      x = conv3x3_forward(x, layers_[i]);
      p.levels[i] = x;
    }
    return p;
  }

  std::string id() const override { return "builtin-random"; }

 private:
  std::array<ConvParams, 3> layers_;
};

class HandcraftedExtractor final : public FeatureExtractor {
 public:
  static constexpr std::size_t kBaseChannels = 12;

  FeaturePyramid extract(const Tensor& image, ImageRole) const override {
    require_image(image, "builtin-handcrafted");
    if (image.channels() != 3) throw ShapeError("builtin-handcrafted expects an RGB tensor");
    FeaturePyramid p;
    Tensor level_image = image;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i > 0)
        level_image = bicubic_resize_to(level_image, ScaleSpec::down(2).apply(level_image.height()),
                                        ScaleSpec::down(2).apply(level_image.width()));
      const auto [gx, gy] = sobel_responses(level_image);
      const Tensor gd = gradient_density(level_image);
      const Tensor base = concat_channels({&level_image, &gx, &gy, &gd});
      Tensor out = Tensor::image(kPyramidChannels[i], base.height(), base.width());
      std::copy(base.data().begin(), base.data().end(), out.data().begin());
      p.levels[i] = std::move(out);
    }
    return p;
  }

  std::string id() const override { return "builtin-handcrafted"; }
};

class FileExtractor final : public FeatureExtractor {
 public:
  explicit FileExtractor(std::filesystem::path dir) : dir_(std::move(dir)) {}

  FeaturePyramid extract(const Tensor& image, ImageRole role) const override {
    require_image(image, "file extractor");
    FeaturePyramid p;
    for (std::size_t i = 0; i < 3; ++i)
      p.levels[i] = load_tensor(level_path(dir_, role, i));
    validate_pyramid(p, image.height(), image.width());
    return p;
  }

  std::string id() const override { return "file:" + dir_.string(); }

  static std::filesystem::path level_path(const std::filesystem::path& dir, ImageRole role,
                                          std::size_t level) {
    return dir / (std::string(role_name(role)) + "_l" + std::to_string(level + 1) + ".tnsr");
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace

std::unique_ptr<FeatureExtractor> make_extractor(const std::string& id, std::uint64_t seed) {
  if (id == "builtin-random") return std::make_unique<RandomProjectionExtractor>(seed);
  if (id == "builtin-handcrafted") return std::make_unique<HandcraftedExtractor>();
  if (id.rfind("file:", 0) == 0 && id.size() > 5)
    return std::make_unique<FileExtractor>(id.substr(5));
  throw ParameterError("unknown extractor '" + id +
                       "' (expected builtin-random, builtin-handcrafted or file:<dir>)");
}

void save_pyramid(const std::filesystem::path& dir, ImageRole role, const FeaturePyramid& p) {
  for (std::size_t i = 0; i < 3; ++i)
    save_tensor(FileExtractor::level_path(dir, role, i), p.levels[i]);
}

}  // namespace patchxfer
