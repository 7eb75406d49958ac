#include "afe/kernels.hpp"

// Reference kernels written directly from the per-element formulas. They
// visit the summation terms of each output element in the same order as
// the parallel kernels.

namespace afe::kernels::serial {

void conv2d_forward(const ConvDims& d, std::span<const double> input, std::span<const double> kernels,
                    std::span<const double> bias, std::span<double> out) {
  const std::size_t oh = d.out_height(), ow = d.out_width(), k = d.kernel;
  for (std::size_t o = 0; o < d.out_channels; ++o) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double acc = bias[o];
        for (std::size_t c = 0; c < d.in_channels; ++c) {
          for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
              acc += input[(c * d.height + y + i) * d.width + x + j] *
                     kernels[((o * d.in_channels + c) * k + i) * k + j];
            }
          }
        }
        out[(o * oh + y) * ow + x] = acc;
      }
    }
  }
}

void conv2d_backward_input(const ConvDims& d, std::span<const double> grad_out,
                           std::span<const double> kernels, std::span<double> grad_in) {
  const std::size_t oh = d.out_height(), ow = d.out_width(), k = d.kernel;
  for (std::size_t c = 0; c < d.in_channels; ++c) {
    for (std::size_t y = 0; y < d.height; ++y) {
      for (std::size_t x = 0; x < d.width; ++x) {
        double acc = 0.0;
        for (std::size_t o = 0; o < d.out_channels; ++o) {
          for (std::size_t i = 0; i < k; ++i) {
            if (y < i || y - i >= oh) continue;
            for (std::size_t j = 0; j < k; ++j) {
              if (x < j || x - j >= ow) continue;
              acc += grad_out[(o * oh + y - i) * ow + x - j] * kernels[((o * d.in_channels + c) * k + i) * k + j];
            }
          }
        }
        grad_in[(c * d.height + y) * d.width + x] = acc;
      }
    }
  }
}

void conv2d_backward_params(const ConvDims& d, std::span<const double> grad_out,
                            std::span<const double> input, std::span<double> grad_kernels,
                            std::span<double> grad_bias) {
  const std::size_t oh = d.out_height(), ow = d.out_width(), k = d.kernel;
  for (std::size_t o = 0; o < d.out_channels; ++o) {
    double gb = 0.0;
    for (std::size_t p = 0; p < oh * ow; ++p) gb += grad_out[o * oh * ow + p];
    grad_bias[o] = gb;
    for (std::size_t c = 0; c < d.in_channels; ++c) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          double acc = 0.0;
          for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
              acc += grad_out[(o * oh + y) * ow + x] * input[(c * d.height + y + i) * d.width + x + j];
            }
          }
          grad_kernels[((o * d.in_channels + c) * k + i) * k + j] = acc;
        }
      }
    }
  }
}

void linear_forward(std::size_t rows, std::size_t cols, std::span<const double> weight,
                    std::span<const double> input, std::span<const double> bias, std::span<double> out) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = bias[r];
    for (std::size_t c = 0; c < cols; ++c) acc += weight[r * cols + c] * input[c];
    out[r] = acc;
  }
}

void linear_backward_input(std::size_t rows, std::size_t cols, std::span<const double> weight,
                           std::span<const double> grad_out, std::span<double> grad_in) {
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += weight[r * cols + c] * grad_out[r];
    grad_in[c] = acc;
  }
}

void linear_backward_params(std::size_t rows, std::size_t cols, std::span<const double> grad_out,
                            std::span<const double> input, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) grad_weight[r * cols + c] = grad_out[r] * input[c];
    grad_bias[r] = grad_out[r];
  }
}

}  // namespace afe::kernels::serial
