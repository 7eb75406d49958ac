#pragma once

#include "afe/rng.hpp"
#include "afe/tensor.hpp"

namespace afe {

/// Flip and photometric jitter, in normalized pixel units.
struct AugmentConfig {
  double flip_probability = 0.5;
  double gain_min = 0.9;
  double gain_max = 1.1;
  double offset_min = -0.1;
  double offset_max = 0.1;
};

struct AugmentDraw {
  bool flip = false;
  double gain = 1.0;
  double offset = 0.0;
};

AugmentDraw draw_augment(Rng& rng, const AugmentConfig& cfg = {});
/// Optional horizontal flip of every channel, then x * gain + offset.
Tensor apply_augment(const Tensor& image, const AugmentDraw& draw);
Tensor augment(const Tensor& image, Rng& rng, const AugmentConfig& cfg = {});

}  // namespace afe
