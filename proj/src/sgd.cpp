#include "afe/sgd.hpp"

#include <string>

#include "afe/error.hpp"

namespace afe {

void SgdConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InputError("sgd: learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InputError("sgd: momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw InputError("sgd: weight_decay must be non-negative");
  if (batch_size == 0) throw InputError("sgd: batch_size must be at least 1");
}

void sgd_step(ParamSet& params, const ParamSet& grads, OptState& state, const SgdConfig& cfg) {
  cfg.validate();
  require_same_layout(params, grads, "sgd_step gradients");
  if (state.velocity.empty()) state.velocity = zeros_like(params);
  require_same_layout(params, state.velocity, "sgd_step velocity");
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k].value.data();
    const auto g = grads[k].value.data();
    auto v = state.velocity[k].value.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g_eff = g[i] + cfg.weight_decay * p[i];
      v[i] = cfg.momentum * v[i] - cfg.learning_rate * g_eff;
      p[i] += v[i];
    }
  }
}

}  // namespace afe
