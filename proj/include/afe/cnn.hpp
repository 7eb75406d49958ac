#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "afe/ops.hpp"
#include "afe/params.hpp"
#include "afe/rng.hpp"
#include "afe/tensor.hpp"

namespace afe {

/// Single-frame regression CNN:
///   [conv -> act -> maxpool2] x2 -> conv -> act -> quadrant pool
///   -> fc -> act -> (dropout) -> linear regression to one scalar.
struct CnnSpec {
  std::size_t input_height = 96;
  std::size_t input_width = 96;
  std::size_t input_channels = 1;
  std::array<std::size_t, 3> conv_filters = {64, 128, 256};
  std::size_t kernel_size = 5;
  std::size_t fc_units = 300;
  double dropout_p = 0.0;
  Activation activation = Activation::relu;

  friend bool operator==(const CnnSpec&, const CnnSpec&) = default;
};

/// Intermediate extents implied by a spec.
struct CnnShapes {
  std::array<Shape, 3> conv_out;
  std::array<Shape, 3> pool_out;
  std::size_t flatten = 0;
};

/// Computes the shape chain, throwing ShapeError naming the first stage that
/// cannot be formed (non-positive extent, odd extent before a 2x2 pool, or a
/// final map smaller than 2x2).
CnnShapes cnn_shapes(const CnnSpec& spec);

class CnnModel {
 public:
  /// All parameters zero.
  explicit CnnModel(const CnnSpec& spec);
  /// Uniform(-s, s) weights with s = sqrt(1/fan_in), zero biases.
  static CnnModel initialized(const CnnSpec& spec, Rng& rng);
  /// Adopts an existing parameter set; names and shapes must match the spec.
  CnnModel(const CnnSpec& spec, ParamSet params);

  const CnnSpec& spec() const { return spec_; }
  const ParamSet& params() const { return params_; }
  /// Mutable access invalidates contexts recorded by earlier forward passes.
  ParamSet& mutable_params() {
    ++revision_;
    return params_;
  }
  std::uint64_t revision() const { return revision_; }

  enum Index : std::size_t {
    kConv1W, kConv1B, kConv2W, kConv2B, kConv3W, kConv3B, kFcW, kFcB, kRegressW, kRegressB
  };

 private:
  CnnSpec spec_;
  ParamSet params_;
  std::uint64_t revision_ = 0;
};

struct CnnContext {
  const CnnModel* model = nullptr;
  std::uint64_t revision = 0;
  std::array<Conv2dContext, 3> conv;
  std::array<ActivationContext, 3> conv_act;
  std::array<PoolContext, 3> pool;
  Shape pooled_shape;
  LinearContext fc;
  ActivationContext fc_act;
  DropoutContext dropout;
  LinearContext regress;
};

struct CnnOutput {
  double valence = 0.0;
  /// Post-activation fc vector, taken before dropout.
  Tensor features;
  CnnContext context;
};

CnnOutput cnn_forward(const CnnModel& model, const Tensor& image, Mode mode, Rng& rng);
/// Parameter gradients of a scalar loss L given dL/dvalence.
ParamSet cnn_backward(const CnnModel& model, const CnnContext& ctx, double d_valence);

/// Eval-mode fc features for every frame, rows in frame order: [T, fc_units].
Tensor extract_features(const CnnModel& model, std::span<const Tensor> frames);

/// Eval-mode valence prediction per frame.
std::vector<double> cnn_predict(const CnnModel& model, std::span<const Tensor> frames);

}  // namespace afe
