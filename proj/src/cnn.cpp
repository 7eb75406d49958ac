#include "afe/cnn.hpp"

#include <cmath>
#include <string>

#include "afe/error.hpp"

namespace afe {

CnnShapes cnn_shapes(const CnnSpec& spec) {
  if (spec.input_height == 0 || spec.input_width == 0 || spec.input_channels == 0) {
    throw ShapeError("cnn spec: input extents must be positive");
  }
  if (spec.kernel_size == 0) throw ShapeError("cnn spec: kernel_size must be positive");
  if (spec.fc_units == 0) throw ShapeError("cnn spec: fc_units must be positive");
  if (!(spec.dropout_p >= 0.0 && spec.dropout_p < 1.0)) {
    throw InputError("cnn spec: dropout_p must lie in [0, 1)");
  }
  CnnShapes shapes;
  std::size_t h = spec.input_height, w = spec.input_width;
  for (std::size_t stage = 0; stage < 3; ++stage) {
    const std::string name = "conv" + std::to_string(stage + 1);
    if (spec.conv_filters[stage] == 0) throw ShapeError(name + ": filter count must be positive");
    if (h < spec.kernel_size || w < spec.kernel_size) {
      throw ShapeError(name + ": input " + std::to_string(h) + "x" + std::to_string(w) +
                       " is smaller than the " + std::to_string(spec.kernel_size) + "x" +
                       std::to_string(spec.kernel_size) + " kernel");
    }
    h = h - spec.kernel_size + 1;
    w = w - spec.kernel_size + 1;
    shapes.conv_out[stage] = {spec.conv_filters[stage], h, w};
    if (stage < 2) {
      if (h % 2 != 0 || w % 2 != 0) {
        throw ShapeError("pool" + std::to_string(stage + 1) + ": input " + std::to_string(h) + "x" +
                         std::to_string(w) + " must have even extents for 2x2 pooling");
      }
      h /= 2;
      w /= 2;
      shapes.pool_out[stage] = {spec.conv_filters[stage], h, w};
    } else {
      if (h < 2 || w < 2) {
        throw ShapeError("quadrant pool: input " + std::to_string(h) + "x" + std::to_string(w) +
                         " is smaller than 2x2");
      }
      shapes.pool_out[stage] = {spec.conv_filters[stage], 2, 2};
    }
  }
  shapes.flatten = spec.conv_filters[2] * 4;
  return shapes;
}

namespace {

ParamSet zero_params(const CnnSpec& spec) {
  const CnnShapes shapes = cnn_shapes(spec);
  const std::size_t k = spec.kernel_size;
  const auto& f = spec.conv_filters;
  return {
      {"conv1.weight", Tensor({f[0], spec.input_channels, k, k})},
      {"conv1.bias", Tensor({f[0]})},
      {"conv2.weight", Tensor({f[1], f[0], k, k})},
      {"conv2.bias", Tensor({f[1]})},
      {"conv3.weight", Tensor({f[2], f[1], k, k})},
      {"conv3.bias", Tensor({f[2]})},
      {"fc.weight", Tensor({spec.fc_units, shapes.flatten})},
      {"fc.bias", Tensor({spec.fc_units})},
      {"regress.weight", Tensor({1, spec.fc_units})},
      {"regress.bias", Tensor({1})},
  };
}

}  // namespace

CnnModel::CnnModel(const CnnSpec& spec) : spec_(spec), params_(zero_params(spec)) {}

CnnModel::CnnModel(const CnnSpec& spec, ParamSet params) : spec_(spec), params_(std::move(params)) {
  require_same_layout(zero_params(spec), params_, "cnn parameters");
}

CnnModel CnnModel::initialized(const CnnSpec& spec, Rng& rng) {
  CnnModel model(spec);
  for (auto& p : model.params_) {
    if (p.value.rank() == 1) continue;
    const std::size_t fan_in = p.value.size() / p.value.dim(0);
    const double s = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (double& v : p.value.data()) v = rng.uniform(-s, s);
  }
  return model;
}

CnnOutput cnn_forward(const CnnModel& model, const Tensor& image, Mode mode, Rng& rng) {
  const CnnSpec& spec = model.spec();
  const ParamSet& p = model.params();
  require_shape(image, {spec.input_channels, spec.input_height, spec.input_width}, "cnn input image");

  CnnOutput out;
  CnnContext& ctx = out.context;
  ctx.model = &model;
  ctx.revision = model.revision();

  Tensor x = image;
  for (std::size_t stage = 0; stage < 3; ++stage) {
    auto conv = conv2d_forward(x, p[2 * stage].value, p[2 * stage + 1].value);
    ctx.conv[stage] = std::move(conv.context);
    auto act = activation_forward(conv.output, spec.activation);
    ctx.conv_act[stage] = std::move(act.context);
    auto pool = stage < 2 ? maxpool2_forward(act.output) : quadrant_pool_forward(act.output);
    ctx.pool[stage] = std::move(pool.context);
    x = std::move(pool.output);
  }
  ctx.pooled_shape = x.shape();
  x = x.reshaped({x.size()});

  auto fc = linear_forward(x, p[CnnModel::kFcW].value, p[CnnModel::kFcB].value);
  ctx.fc = std::move(fc.context);
  auto fc_act = activation_forward(fc.output, spec.activation);
  ctx.fc_act = std::move(fc_act.context);
  out.features = fc_act.output;

  auto drop = dropout_forward(fc_act.output, spec.dropout_p, mode, rng);
  ctx.dropout = std::move(drop.context);
  auto reg = linear_forward(drop.output, p[CnnModel::kRegressW].value, p[CnnModel::kRegressB].value);
  ctx.regress = std::move(reg.context);
  out.valence = reg.output[0];
  return out;
}

ParamSet cnn_backward(const CnnModel& model, const CnnContext& ctx, double d_valence) {
  if (ctx.model != &model) throw Error("cnn_backward: context was produced by a different model");
  if (ctx.revision != model.revision()) {
    throw Error("cnn_backward: stale context, parameters changed since the forward pass");
  }
  const ParamSet& p = model.params();
  ParamSet grads = zeros_like(p);

  auto reg = linear_backward(ctx.regress, p[CnnModel::kRegressW].value, Tensor({1}, {d_valence}));
  grads[CnnModel::kRegressW].value = std::move(reg.weight);
  grads[CnnModel::kRegressB].value = std::move(reg.bias);

  Tensor g = dropout_backward(ctx.dropout, reg.input);
  g = activation_backward(ctx.fc_act, g);
  auto fc = linear_backward(ctx.fc, p[CnnModel::kFcW].value, g);
  grads[CnnModel::kFcW].value = std::move(fc.weight);
  grads[CnnModel::kFcB].value = std::move(fc.bias);

  g = fc.input.reshaped(ctx.pooled_shape);
  for (std::size_t s = 3; s-- > 0;) {
    g = pool_backward(ctx.pool[s], g);
    g = activation_backward(ctx.conv_act[s], g);
    auto conv = conv2d_backward(ctx.conv[s], p[2 * s].value, g);
    grads[2 * s].value = std::move(conv.kernels);
    grads[2 * s + 1].value = std::move(conv.bias);
    g = std::move(conv.input);
  }
  return grads;
}

namespace {

void check_frames(const CnnSpec& spec, std::span<const Tensor> frames) {
  const Shape expected{spec.input_channels, spec.input_height, spec.input_width};
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].shape() != expected) {
      throw ShapeError("frame " + std::to_string(i) + ": expected shape " + shape_string(expected) +
                       ", got " + shape_string(frames[i].shape()));
    }
  }
}

}  // namespace

Tensor extract_features(const CnnModel& model, std::span<const Tensor> frames) {
  check_frames(model.spec(), frames);
  if (frames.empty()) throw ShapeError("extract_features: no frames");
  const std::size_t dim = model.spec().fc_units;
  Tensor out({frames.size(), dim});
  const auto n = static_cast<std::int64_t>(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    Rng unused(0);
    const auto fwd = cnn_forward(model, frames[i], Mode::eval, unused);
    std::copy(fwd.features.data().begin(), fwd.features.data().end(), out.data().begin() + i * dim);
  }
  return out;
}

std::vector<double> cnn_predict(const CnnModel& model, std::span<const Tensor> frames) {
  check_frames(model.spec(), frames);
  std::vector<double> out(frames.size());
  const auto n = static_cast<std::int64_t>(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    Rng unused(0);
    out[i] = cnn_forward(model, frames[i], Mode::eval, unused).valence;
  }
  return out;
}

}  // namespace afe
