#include "afe/augment.hpp"

#include <algorithm>

namespace afe {

AugmentDraw draw_augment(Rng& rng, const AugmentConfig& cfg) {
  AugmentDraw d;
  d.flip = rng.bernoulli(cfg.flip_probability);
  d.gain = rng.uniform(cfg.gain_min, cfg.gain_max);
  d.offset = rng.uniform(cfg.offset_min, cfg.offset_max);
  return d;
}

Tensor apply_augment(const Tensor& image, const AugmentDraw& draw) {
  require_rank(image, 3, "augment input");
  Tensor out = image;
  if (draw.flip) {
    const std::size_t rows = image.dim(0) * image.dim(1), width = image.dim(2);
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = out.data().subspan(r * width, width);
      std::reverse(row.begin(), row.end());
    }
  }
  if (draw.gain != 1.0 || draw.offset != 0.0) {
    for (double& v : out.data()) v = v * draw.gain + draw.offset;
  }
  return out;
}

Tensor augment(const Tensor& image, Rng& rng, const AugmentConfig& cfg) {
  return apply_augment(image, draw_augment(rng, cfg));
}

}  // namespace afe
