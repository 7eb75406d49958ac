#include "afe/ops.hpp"

#include <cmath>

#include "afe/error.hpp"
#include "afe/kernels.hpp"

namespace afe {

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation parse_activation(const std::string& name) {
  if (name == "relu" || name == "ReLU") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw InputError("unknown activation '" + name + "' (expected relu or tanh)");
}

namespace {

void require_grad(const Shape& expected, const Tensor& grad, const char* op) {
  if (grad.shape() != expected) {
    throw ShapeError(std::string(op) + " backward: upstream gradient has shape " +
                     shape_string(grad.shape()) + " but forward produced " + shape_string(expected));
  }
}

}  // namespace

Conv2dResult conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
  require_rank(input, 3, "conv2d input");
  require_rank(kernels, 4, "conv2d kernels");
  kernels::ConvDims d{input.dim(0), input.dim(1), input.dim(2), kernels.dim(0), kernels.dim(2)};
  if (kernels.dim(1) != d.in_channels) {
    throw ShapeError("conv2d: kernel input-channel dimension " + std::to_string(kernels.dim(1)) +
                     " does not match input channels " + std::to_string(d.in_channels));
  }
  if (kernels.dim(3) != d.kernel) {
    throw ShapeError("conv2d: kernels must be square, got " + shape_string(kernels.shape()));
  }
  if (d.height < d.kernel) {
    throw ShapeError("conv2d: input height " + std::to_string(d.height) + " is smaller than kernel " +
                     std::to_string(d.kernel));
  }
  if (d.width < d.kernel) {
    throw ShapeError("conv2d: input width " + std::to_string(d.width) + " is smaller than kernel " +
                     std::to_string(d.kernel));
  }
  require_shape(bias, {d.out_channels}, "conv2d bias");

  Tensor out({d.out_channels, d.out_height(), d.out_width()});
  kernels::conv2d_forward(d, input.data(), kernels.data(), bias.data(), out.data());
  Conv2dContext ctx{input, kernels.shape(), out.shape()};
  return {std::move(out), std::move(ctx)};
}

Conv2dGrads conv2d_backward(const Conv2dContext& ctx, const Tensor& kernels, const Tensor& grad_out) {
  require_grad(ctx.output_shape, grad_out, "conv2d");
  require_shape(kernels, ctx.kernel_shape, "conv2d backward kernels");
  const Tensor& input = ctx.input;
  kernels::ConvDims d{input.dim(0), input.dim(1), input.dim(2), kernels.dim(0), kernels.dim(2)};
  Conv2dGrads g{Tensor(input.shape()), Tensor(kernels.shape()), Tensor({d.out_channels})};
  kernels::conv2d_backward_input(d, grad_out.data(), kernels.data(), g.input.data());
  kernels::conv2d_backward_params(d, grad_out.data(), input.data(), g.kernels.data(), g.bias.data());
  return g;
}

PoolResult maxpool2_forward(const Tensor& input) {
  require_rank(input, 3, "maxpool2 input");
  const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
  if (H % 2 != 0) throw ShapeError("maxpool2: input height " + std::to_string(H) + " is odd");
  if (W % 2 != 0) throw ShapeError("maxpool2: input width " + std::to_string(W) + " is odd");
  const std::size_t oh = H / 2, ow = W / 2;
  Tensor out({C, oh, ow});
  PoolContext ctx{input.shape(), out.shape(), std::vector<std::size_t>(out.size())};
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = (c * H + 2 * y) * W + 2 * x;
        for (std::size_t i = 0; i < 2; ++i) {
          for (std::size_t j = 0; j < 2; ++j) {
            const std::size_t idx = (c * H + 2 * y + i) * W + 2 * x + j;
            if (input[idx] > input[best]) best = idx;
          }
        }
        const std::size_t o = (c * oh + y) * ow + x;
        out[o] = input[best];
        ctx.argmax[o] = best;
      }
    }
  }
  return {std::move(out), std::move(ctx)};
}

PoolResult quadrant_pool_forward(const Tensor& input) {
  require_rank(input, 3, "quadrant_pool input");
  const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
  if (H < 2) throw ShapeError("quadrant_pool: input height " + std::to_string(H) + " is below 2");
  if (W < 2) throw ShapeError("quadrant_pool: input width " + std::to_string(W) + " is below 2");
  const std::size_t ys[3] = {0, H / 2, H};
  const std::size_t xs[3] = {0, W / 2, W};
  Tensor out({C, 2, 2});
  PoolContext ctx{input.shape(), out.shape(), std::vector<std::size_t>(out.size())};
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t qy = 0; qy < 2; ++qy) {
      for (std::size_t qx = 0; qx < 2; ++qx) {
        std::size_t best = (c * H + ys[qy]) * W + xs[qx];
        for (std::size_t y = ys[qy]; y < ys[qy + 1]; ++y) {
          for (std::size_t x = xs[qx]; x < xs[qx + 1]; ++x) {
            const std::size_t idx = (c * H + y) * W + x;
            if (input[idx] > input[best]) best = idx;
          }
        }
        const std::size_t o = (c * 2 + qy) * 2 + qx;
        out[o] = input[best];
        ctx.argmax[o] = best;
      }
    }
  }
  return {std::move(out), std::move(ctx)};
}

Tensor pool_backward(const PoolContext& ctx, const Tensor& grad_out) {
  require_grad(ctx.output_shape, grad_out, "pool");
  Tensor grad_in(ctx.input_shape);
  for (std::size_t o = 0; o < grad_out.size(); ++o) grad_in[ctx.argmax[o]] += grad_out[o];
  return grad_in;
}

ActivationResult activation_forward(const Tensor& input, Activation kind) {
  Tensor out = input;
  if (kind == Activation::relu) {
    for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  } else {
    for (double& v : out.data()) v = std::tanh(v);
  }
  ActivationContext ctx{kind, out};
  return {std::move(out), std::move(ctx)};
}

Tensor activation_backward(const ActivationContext& ctx, const Tensor& grad_out) {
  require_grad(ctx.output.shape(), grad_out, "activation");
  Tensor g = grad_out;
  const auto y = ctx.output.data();
  if (ctx.kind == Activation::relu) {
    // relu(x) > 0 exactly when x > 0, so the derivative at x = 0 is 0.
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = y[i] > 0.0 ? g[i] : 0.0;
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= 1.0 - y[i] * y[i];
  }
  return g;
}

LinearResult linear_forward(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  require_rank(weight, 2, "linear weight");
  const std::size_t rows = weight.dim(0), cols = weight.dim(1);
  if (input.size() != cols) {
    throw ShapeError("linear: input has " + std::to_string(input.size()) + " elements but weight " +
                     shape_string(weight.shape()) + " expects " + std::to_string(cols));
  }
  require_shape(bias, {rows}, "linear bias");
  Tensor out({rows});
  kernels::linear_forward(rows, cols, weight.data(), input.data(), bias.data(), out.data());
  LinearContext ctx{input, weight.shape()};
  return {std::move(out), std::move(ctx)};
}

LinearGrads linear_backward(const LinearContext& ctx, const Tensor& weight, const Tensor& grad_out) {
  require_shape(weight, ctx.weight_shape, "linear backward weight");
  const std::size_t rows = weight.dim(0), cols = weight.dim(1);
  require_grad({rows}, grad_out, "linear");
  LinearGrads g{Tensor(ctx.input.shape()), Tensor(weight.shape()), Tensor({rows})};
  kernels::linear_backward_input(rows, cols, weight.data(), grad_out.data(), g.input.data());
  kernels::linear_backward_params(rows, cols, grad_out.data(), ctx.input.data(), g.weight.data(),
                                  g.bias.data());
  return g;
}

DropoutResult dropout_forward(const Tensor& input, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw InputError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  DropoutContext ctx{input.shape(), {}};
  if (mode == Mode::eval || p == 0.0) return {input, std::move(ctx)};
  const double keep_scale = 1.0 / (1.0 - p);
  ctx.scale.resize(input.size());
  Tensor out = input;
  for (std::size_t i = 0; i < out.size(); ++i) {
    ctx.scale[i] = rng.bernoulli(p) ? 0.0 : keep_scale;
    out[i] *= ctx.scale[i];
  }
  return {std::move(out), std::move(ctx)};
}

Tensor dropout_backward(const DropoutContext& ctx, const Tensor& grad_out) {
  require_grad(ctx.shape, grad_out, "dropout");
  if (ctx.scale.empty()) return grad_out;
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= ctx.scale[i];
  return g;
}

MseResult mse_forward(const Tensor& pred, const Tensor& target) {
  if (pred.size() == 0) throw ShapeError("mse: empty prediction");
  if (pred.size() != target.size()) {
    throw ShapeError("mse: prediction has " + std::to_string(pred.size()) + " elements, target has " +
                     std::to_string(target.size()));
  }
  Tensor diff({pred.size()});
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    diff[i] = pred[i] - target[i];
    acc += diff[i] * diff[i];
  }
  return {acc / static_cast<double>(pred.size()), MseContext{std::move(diff)}};
}

Tensor mse_backward(const MseContext& ctx, double upstream) {
  Tensor g = ctx.diff;
  const double scale = 2.0 * upstream / static_cast<double>(g.size());
  for (double& v : g.data()) v *= scale;
  return g;
}

}  // namespace afe
