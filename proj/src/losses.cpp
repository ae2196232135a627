#include "patchxfer/losses.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "patchxfer/error.hpp"
#include "patchxfer/gradient.hpp"

namespace patchxfer {

namespace {

double mean_abs_diff(const Tensor& a, const Tensor& b, const char* where) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(where) + ": shape mismatch " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(static_cast<double>(a[i]) - b[i]);
  return acc / static_cast<double>(a.size());
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double l1_rec(const Tensor& sr, const Tensor& hr) { return mean_abs_diff(sr, hr, "l1_rec"); }

double perceptual_loss(const FeaturePyramid& sr, const FeaturePyramid& hr, std::size_t level) {
  if (level >= 3) throw ParameterError("perceptual_loss: level must be 0, 1 or 2");
  return mean_abs_diff(sr.levels[level], hr.levels[level], "perceptual_loss");
}

double grad_loss(const Tensor& sr, const Tensor& hr) {
  if (sr.shape() != hr.shape())
    throw ShapeError("grad_loss: shape mismatch " + shape_string(sr.shape()) + " vs " +
                     shape_string(hr.shape()));
  return mean_abs_diff(gradient_density(sr), gradient_density(hr), "grad_loss");
}

AdversarialLosses wgan_gp_losses(const CriticOutputs& c, double lambda) {
  if (c.generated.empty() || c.generated.size() != c.real.size() ||
      c.generated.size() != c.grad_norms.size())
    throw ShapeError("wgan_gp_losses: batch lengths " + std::to_string(c.generated.size()) +
                     ", " + std::to_string(c.real.size()) + ", " +
                     std::to_string(c.grad_norms.size()) + " must be equal and non-zero");
  double penalty = 0.0;
  for (double n : c.grad_norms) {
    if (n < 0.0) throw ParameterError("wgan_gp_losses: negative gradient norm");
    penalty += (n - 1.0) * (n - 1.0);
  }
  penalty /= static_cast<double>(c.grad_norms.size());
  const double gen = mean(c.generated);
  AdversarialLosses out;
  out.penalty = penalty;
  out.discriminator = gen - mean(c.real) + lambda * penalty;
  out.generator = -gen;
  return out;
}

double total_loss(const LossParts& parts, const LossWeights& w) {
  return w.rec * parts.rec + w.perc * parts.perc + w.grad * parts.grad + w.adv * parts.adv;
}

}  // namespace patchxfer
