#pragma once

// Differentiable primitives. Each `*_forward` returns its output together
// with the context its matching `*_backward` needs; backward validates that
// the upstream gradient has the shape the forward produced.

#include <cstddef>
#include <string>
#include <vector>

#include "afe/rng.hpp"
#include "afe/tensor.hpp"

namespace afe {

enum class Activation { relu, tanh };
enum class Mode { train, eval };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

// ---- convolution ---------------------------------------------------------

struct Conv2dContext {
  Tensor input;
  Shape kernel_shape;
  Shape output_shape;
};
struct Conv2dResult {
  Tensor output;
  Conv2dContext context;
};
struct Conv2dGrads {
  Tensor input;
  Tensor kernels;
  Tensor bias;
};

/// Valid convolution of input [C_in,H,W] with kernels [C_out,C_in,k,k].
Conv2dResult conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias);
Conv2dGrads conv2d_backward(const Conv2dContext& ctx, const Tensor& kernels, const Tensor& grad_out);

// ---- pooling -------------------------------------------------------------

/// Records, for each output element, the flat input index that won the max.
struct PoolContext {
  Shape input_shape;
  Shape output_shape;
  std::vector<std::size_t> argmax;
};
struct PoolResult {
  Tensor output;
  PoolContext context;
};

/// Disjoint 2x2 max pooling; H and W must be even.
PoolResult maxpool2_forward(const Tensor& input);
/// Max over the four quadrants of each channel, split at floor(H/2), floor(W/2).
PoolResult quadrant_pool_forward(const Tensor& input);
/// Shared by both pooling ops: routes each upstream value to its argmax.
Tensor pool_backward(const PoolContext& ctx, const Tensor& grad_out);

// ---- pointwise -----------------------------------------------------------

struct ActivationContext {
  Activation kind = Activation::relu;
  Tensor output;
};
struct ActivationResult {
  Tensor output;
  ActivationContext context;
};

ActivationResult activation_forward(const Tensor& input, Activation kind);
Tensor activation_backward(const ActivationContext& ctx, const Tensor& grad_out);

// ---- fully connected -----------------------------------------------------

struct LinearContext {
  Tensor input;
  Shape weight_shape;
};
struct LinearResult {
  Tensor output;
  LinearContext context;
};
struct LinearGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};

LinearResult linear_forward(const Tensor& input, const Tensor& weight, const Tensor& bias);
LinearGrads linear_backward(const LinearContext& ctx, const Tensor& weight, const Tensor& grad_out);

// ---- dropout -------------------------------------------------------------

struct DropoutContext {
  Shape shape;
  /// Per-element multiplier (0 or 1/(1-p)); empty when the op was the identity.
  std::vector<double> scale;
};
struct DropoutResult {
  Tensor output;
  DropoutContext context;
};

/// Inverted dropout: in train mode each element is zeroed with probability
/// p and survivors are scaled by 1/(1-p). Eval mode returns the input as is.
DropoutResult dropout_forward(const Tensor& input, double p, Mode mode, Rng& rng);
Tensor dropout_backward(const DropoutContext& ctx, const Tensor& grad_out);

// ---- loss ----------------------------------------------------------------

struct MseContext {
  Tensor diff;
};
struct MseResult {
  double loss = 0.0;
  MseContext context;
};

/// (1/n) * sum (pred - target)^2
MseResult mse_forward(const Tensor& pred, const Tensor& target);
/// Gradient w.r.t. pred, scaled by `upstream`.
Tensor mse_backward(const MseContext& ctx, double upstream = 1.0);

}  // namespace afe
