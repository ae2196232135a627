#pragma once

#include <cstddef>
#include <vector>

#include "patchxfer/features.hpp"
#include "patchxfer/tensor.hpp"

namespace patchxfer {

/// Mean absolute difference, (c h w)^-1 ||SR - HR||_1.
double l1_rec(const Tensor& sr, const Tensor& hr);

/// Mean absolute difference of one pyramid level (0-based).
double perceptual_loss(const FeaturePyramid& sr, const FeaturePyramid& hr, std::size_t level);

/// Mean absolute difference of the gradient-density maps.
double grad_loss(const Tensor& sr, const Tensor& hr);

/// Critic values supplied by the caller: scores on generated and real
/// samples and gradient norms at the interpolates.
struct CriticOutputs {
  std::vector<double> generated;
  std::vector<double> real;
  std::vector<double> grad_norms;
};

struct AdversarialLosses {
  double discriminator = 0.0;  // L_D
  double generator = 0.0;      // L_G
  double penalty = 0.0;        // mean((||grad|| - 1)^2), before weighting
};

inline constexpr double kDefaultGradientPenalty = 10.0;

/// L_D = mean(D(gen)) - mean(D(real)) + lambda * mean((||grad|| - 1)^2)
/// L_G = -mean(D(gen))
AdversarialLosses wgan_gp_losses(const CriticOutputs& c,
                                 double lambda = kDefaultGradientPenalty);

struct LossWeights {
  double rec = 1.0;
  double perc = 1e-2;
  double grad = 1e-3;
  double adv = 1e-3;
};

struct LossParts {
  double rec = 0.0;
  double perc = 0.0;
  double grad = 0.0;
  double adv = 0.0;
};

double total_loss(const LossParts& parts, const LossWeights& w = {});

}  // namespace patchxfer
