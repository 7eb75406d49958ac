#pragma once

#include <cstdint>
#include <vector>

#include "afe/ops.hpp"
#include "afe/params.hpp"
#include "afe/rng.hpp"
#include "afe/tensor.hpp"

namespace afe {

/// Stacked Elman RNN over a window of per-frame feature vectors. Each step of
/// the top layer is regressed to a valence value by a shared linear head.
struct RnnSpec {
  std::size_t input_dim = 300;
  std::vector<std::size_t> hidden_sizes = {100};
  std::size_t window = 100;
  Activation activation = Activation::relu;

  friend bool operator==(const RnnSpec&, const RnnSpec&) = default;
};

void validate(const RnnSpec& spec);

class RnnModel {
 public:
  explicit RnnModel(const RnnSpec& spec);
  static RnnModel initialized(const RnnSpec& spec, Rng& rng);
  RnnModel(const RnnSpec& spec, ParamSet params);

  const RnnSpec& spec() const { return spec_; }
  const ParamSet& params() const { return params_; }
  ParamSet& mutable_params() {
    ++revision_;
    return params_;
  }
  std::uint64_t revision() const { return revision_; }

  // Parameter layout: per layer l, [3l] = w_x, [3l+1] = w_h, [3l+2] = b;
  // then head weight and head bias.
  std::size_t head_index() const { return 3 * spec_.hidden_sizes.size(); }

 private:
  RnnSpec spec_;
  ParamSet params_;
  std::uint64_t revision_ = 0;
};

struct RnnContext {
  const RnnModel* model = nullptr;
  std::uint64_t revision = 0;
  Tensor inputs;
  /// Post-activation hidden states per layer, [L, hidden].
  std::vector<Tensor> hidden;
};

struct RnnOutput {
  Tensor outputs;
  RnnContext context;
};

/// Runs a window of exactly spec.window rows of shape [W, input_dim] starting
/// from a zero hidden state. Returns one prediction per step.
RnnOutput rnn_forward(const RnnModel& model, const Tensor& window);
/// Same recurrence for any sequence length in [1, spec.window]; used for the
/// truncated prefixes at the start of a timeline.
RnnOutput rnn_forward_prefix(const RnnModel& model, const Tensor& sequence);
/// Backpropagation through time; gradients are summed over steps.
ParamSet rnn_backward(const RnnModel& model, const RnnContext& ctx, const Tensor& d_outputs);

/// For every frame t, the last-step output of the window ending at t:
/// frames [t-W+1, t] when t >= W-1, otherwise the prefix [0, t].
Tensor predict_timeline(const RnnModel& model, const Tensor& features);

}  // namespace afe
