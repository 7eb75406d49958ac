#include "afe/rnn.hpp"

#include <cmath>
#include <string>

#include "afe/error.hpp"
#include "afe/kernels.hpp"

namespace afe {

void validate(const RnnSpec& spec) {
  if (spec.input_dim == 0) throw InputError("rnn spec: input_dim must be positive");
  if (spec.hidden_sizes.empty()) throw InputError("rnn spec: hidden_sizes must not be empty");
  for (std::size_t h : spec.hidden_sizes) {
    if (h == 0) throw InputError("rnn spec: hidden layer widths must be positive");
  }
  if (spec.window == 0) throw InputError("rnn spec: window must be at least 1");
}

namespace {

ParamSet zero_params(const RnnSpec& spec) {
  validate(spec);
  ParamSet p;
  std::size_t in = spec.input_dim;
  for (std::size_t l = 0; l < spec.hidden_sizes.size(); ++l) {
    const std::size_t h = spec.hidden_sizes[l];
    const std::string prefix = "rnn" + std::to_string(l) + ".";
    p.push_back({prefix + "w_x", Tensor({h, in})});
    p.push_back({prefix + "w_h", Tensor({h, h})});
    p.push_back({prefix + "bias", Tensor({h})});
    in = h;
  }
  p.push_back({"head.weight", Tensor({1, in})});
  p.push_back({"head.bias", Tensor({1})});
  return p;
}

double derivative_from_output(Activation kind, double y) {
  return kind == Activation::relu ? (y > 0.0 ? 1.0 : 0.0) : 1.0 - y * y;
}

double activate(Activation kind, double a) { return kind == Activation::relu ? (a > 0.0 ? a : 0.0) : std::tanh(a); }

}  // namespace

RnnModel::RnnModel(const RnnSpec& spec) : spec_(spec), params_(zero_params(spec)) {}

RnnModel::RnnModel(const RnnSpec& spec, ParamSet params) : spec_(spec), params_(std::move(params)) {
  require_same_layout(zero_params(spec), params_, "rnn parameters");
}

RnnModel RnnModel::initialized(const RnnSpec& spec, Rng& rng) {
  RnnModel model(spec);
  for (auto& p : model.params_) {
    if (p.value.rank() == 1) continue;
    const double s = std::sqrt(1.0 / static_cast<double>(p.value.dim(1)));
    for (double& v : p.value.data()) v = rng.uniform(-s, s);
  }
  return model;
}

RnnOutput rnn_forward_prefix(const RnnModel& model, const Tensor& sequence) {
  const RnnSpec& spec = model.spec();
  require_rank(sequence, 2, "rnn input window");
  const std::size_t steps = sequence.dim(0);
  if (steps == 0 || steps > spec.window) {
    throw ShapeError("rnn: sequence has " + std::to_string(steps) + " steps, window is " +
                     std::to_string(spec.window));
  }
  if (sequence.dim(1) != spec.input_dim) {
    throw ShapeError("rnn: feature dimension " + std::to_string(sequence.dim(1)) + " does not match input_dim " +
                     std::to_string(spec.input_dim));
  }
  const ParamSet& p = model.params();
  RnnOutput out;
  RnnContext& ctx = out.context;
  ctx.model = &model;
  ctx.revision = model.revision();
  ctx.inputs = sequence;

  ctx.hidden.reserve(spec.hidden_sizes.size());
  const Tensor* below = &sequence;
  std::size_t in = spec.input_dim;
  for (std::size_t l = 0; l < spec.hidden_sizes.size(); ++l) {
    const std::size_t h = spec.hidden_sizes[l];
    const Tensor& wx = p[3 * l].value;
    const Tensor& wh = p[3 * l + 1].value;
    const Tensor& b = p[3 * l + 2].value;
    Tensor states({steps, h});
    std::vector<double> pre(h);
    for (std::size_t t = 0; t < steps; ++t) {
      kernels::serial::linear_forward(h, in, wx.data(), below->data().subspan(t * in, in), b.data(), pre);
      if (t > 0) {
        const auto prev = states.data().subspan((t - 1) * h, h);
        for (std::size_t r = 0; r < h; ++r) {
          double acc = 0.0;
          for (std::size_t c = 0; c < h; ++c) acc += wh.at(r, c) * prev[c];
          pre[r] += acc;
        }
      }
      for (std::size_t r = 0; r < h; ++r) states.at(t, r) = activate(spec.activation, pre[r]);
    }
    ctx.hidden.push_back(std::move(states));
    below = &ctx.hidden.back();
    in = h;
  }

  const Tensor& head_w = p[model.head_index()].value;
  const double head_b = p[model.head_index() + 1].value[0];
  out.outputs = Tensor({steps});
  for (std::size_t t = 0; t < steps; ++t) {
    double acc = head_b;
    for (std::size_t c = 0; c < in; ++c) acc += head_w[c] * below->at(t, c);
    out.outputs[t] = acc;
  }
  return out;
}

RnnOutput rnn_forward(const RnnModel& model, const Tensor& window) {
  require_rank(window, 2, "rnn input window");
  if (window.dim(0) != model.spec().window) {
    throw ShapeError("rnn: window has " + std::to_string(window.dim(0)) + " rows, expected " +
                     std::to_string(model.spec().window));
  }
  return rnn_forward_prefix(model, window);
}

ParamSet rnn_backward(const RnnModel& model, const RnnContext& ctx, const Tensor& d_outputs) {
  if (ctx.model != &model) throw Error("rnn_backward: context was produced by a different model");
  if (ctx.revision != model.revision()) {
    throw Error("rnn_backward: stale context, parameters changed since the forward pass");
  }
  const RnnSpec& spec = model.spec();
  const std::size_t steps = ctx.inputs.dim(0);
  require_shape(d_outputs, {steps}, "rnn_backward upstream gradient");
  const ParamSet& p = model.params();
  ParamSet grads = zeros_like(p);
  const std::size_t layers = spec.hidden_sizes.size();

  // Gradient flowing into the top layer's states from the head.
  const std::size_t top = spec.hidden_sizes.back();
  Tensor d_states({steps, top});
  {
    const Tensor& head_w = p[model.head_index()].value;
    Tensor& g_w = grads[model.head_index()].value;
    double& g_b = grads[model.head_index() + 1].value[0];
    for (std::size_t t = 0; t < steps; ++t) {
      const double dy = d_outputs[t];
      g_b += dy;
      for (std::size_t c = 0; c < top; ++c) {
        g_w[c] += dy * ctx.hidden[layers - 1].at(t, c);
        d_states.at(t, c) = dy * head_w[c];
      }
    }
  }

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t h = spec.hidden_sizes[l];
    const Tensor& below = l == 0 ? ctx.inputs : ctx.hidden[l - 1];
    const std::size_t in = below.dim(1);
    const Tensor& states = ctx.hidden[l];
    const Tensor& wx = p[3 * l].value;
    const Tensor& wh = p[3 * l + 1].value;
    Tensor& g_wx = grads[3 * l].value;
    Tensor& g_wh = grads[3 * l + 1].value;
    Tensor& g_b = grads[3 * l + 2].value;

    Tensor d_below({steps, in});
    std::vector<double> carry(h, 0.0);  // dL/dh_t arriving from step t+1
    std::vector<double> d_pre(h);
    for (std::size_t t = steps; t-- > 0;) {
      for (std::size_t r = 0; r < h; ++r) {
        d_pre[r] = (d_states.at(t, r) + carry[r]) * derivative_from_output(spec.activation, states.at(t, r));
      }
      for (std::size_t r = 0; r < h; ++r) {
        const double g = d_pre[r];
        g_b[r] += g;
        for (std::size_t c = 0; c < in; ++c) g_wx.at(r, c) += g * below.at(t, c);
        if (t > 0) {
          for (std::size_t c = 0; c < h; ++c) g_wh.at(r, c) += g * states.at(t - 1, c);
        }
      }
      for (std::size_t c = 0; c < in; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < h; ++r) acc += wx.at(r, c) * d_pre[r];
        d_below.at(t, c) = acc;
      }
      for (std::size_t c = 0; c < h; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < h; ++r) acc += wh.at(r, c) * d_pre[r];
        carry[c] = acc;
      }
    }
    d_states = std::move(d_below);
  }
  return grads;
}

Tensor predict_timeline(const RnnModel& model, const Tensor& features) {
  require_rank(features, 2, "predict_timeline features");
  const std::size_t T = features.dim(0);
  if (T == 0) throw ShapeError("predict_timeline: empty timeline");
  const std::size_t dim = features.dim(1);
  const std::size_t W = model.spec().window;
  Tensor out({T});
  const auto n = static_cast<std::int64_t>(T);
#pragma omp parallel for schedule(static)
  for (std::int64_t ti = 0; ti < n; ++ti) {
    const auto t = static_cast<std::size_t>(ti);
    const std::size_t first = t + 1 >= W ? t + 1 - W : 0;
    const std::size_t len = t - first + 1;
    Tensor window({len, dim}, std::vector<double>(features.data().begin() + first * dim,
                                                  features.data().begin() + (t + 1) * dim));
    out[t] = rnn_forward_prefix(model, window).outputs[len - 1];
  }
  return out;
}

}  // namespace afe
