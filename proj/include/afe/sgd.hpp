#pragma once

#include <cstdint>

#include "afe/params.hpp"

namespace afe {

/// Plain SGD with classical momentum and L2 weight decay folded into the
/// gradient. The learning rate is constant for the whole run.
struct SgdConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-5;
  std::size_t batch_size = 128;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;

  /// Same constants without weight decay, the RNN default.
  static SgdConfig rnn_defaults() {
    SgdConfig c;
    c.weight_decay = 0.0;
    return c;
  }

  void validate() const;
  friend bool operator==(const SgdConfig&, const SgdConfig&) = default;
};

/// Velocity per parameter, same names and shapes as the parameter set.
struct OptState {
  ParamSet velocity;
};

/// For each parameter p with gradient g:
///   g' = g + weight_decay * p;  v = momentum * v - learning_rate * g';  p = p + v
/// An empty state is initialized to zero velocities on first use.
void sgd_step(ParamSet& params, const ParamSet& grads, OptState& state, const SgdConfig& cfg);

}  // namespace afe
