#pragma once

// Inner loops of the convolution and fully-connected primitives.
//
// Two implementations share one contract: `afe::kernels` is OpenMP-parallel
// and is what the ops call, `afe::kernels::serial` is the plain reference
// kept for tests and benchmarks. Every output element is accumulated in the
// same order by both, so their results agree bit-for-bit at any thread count.

#include <cstddef>
#include <span>

namespace afe::kernels {

/// Valid (unpadded, stride 1) convolution geometry.
struct ConvDims {
  std::size_t in_channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;

  std::size_t out_height() const { return height - kernel + 1; }
  std::size_t out_width() const { return width - kernel + 1; }
  std::size_t input_size() const { return in_channels * height * width; }
  std::size_t kernels_size() const { return out_channels * in_channels * kernel * kernel; }
  std::size_t output_size() const { return out_channels * out_height() * out_width(); }
  std::size_t macs() const { return output_size() * in_channels * kernel * kernel; }
};

// out[o,y,x] = bias[o] + sum_{c,i,j} in[c,y+i,x+j] * k[o,c,i,j]
void conv2d_forward(const ConvDims& d, std::span<const double> input, std::span<const double> kernels,
                    std::span<const double> bias, std::span<double> out);
// grad_in[c,y,x] = sum_{o,i,j} grad_out[o,y-i,x-j] * k[o,c,i,j]  (overwrites grad_in)
void conv2d_backward_input(const ConvDims& d, std::span<const double> grad_out,
                           std::span<const double> kernels, std::span<double> grad_in);
// grad_k[o,c,i,j] = sum_{y,x} grad_out[o,y,x] * in[c,y+i,x+j]; grad_b[o] = sum grad_out[o,.,.]
void conv2d_backward_params(const ConvDims& d, std::span<const double> grad_out,
                            std::span<const double> input, std::span<double> grad_kernels,
                            std::span<double> grad_bias);

// out = W x + b, W is rows x cols row-major
void linear_forward(std::size_t rows, std::size_t cols, std::span<const double> weight,
                    std::span<const double> input, std::span<const double> bias, std::span<double> out);
// grad_in = W^T grad_out  (overwrites grad_in)
void linear_backward_input(std::size_t rows, std::size_t cols, std::span<const double> weight,
                           std::span<const double> grad_out, std::span<double> grad_in);
// grad_w = grad_out input^T, grad_b = grad_out  (overwrites both)
void linear_backward_params(std::size_t rows, std::size_t cols, std::span<const double> grad_out,
                            std::span<const double> input, std::span<double> grad_weight,
                            std::span<double> grad_bias);

namespace serial {

void conv2d_forward(const ConvDims& d, std::span<const double> input, std::span<const double> kernels,
                    std::span<const double> bias, std::span<double> out);
void conv2d_backward_input(const ConvDims& d, std::span<const double> grad_out,
                           std::span<const double> kernels, std::span<double> grad_in);
void conv2d_backward_params(const ConvDims& d, std::span<const double> grad_out,
                            std::span<const double> input, std::span<double> grad_kernels,
                            std::span<double> grad_bias);
void linear_forward(std::size_t rows, std::size_t cols, std::span<const double> weight,
                    std::span<const double> input, std::span<const double> bias, std::span<double> out);
void linear_backward_input(std::size_t rows, std::size_t cols, std::span<const double> weight,
                           std::span<const double> grad_out, std::span<double> grad_in);
void linear_backward_params(std::size_t rows, std::size_t cols, std::span<const double> grad_out,
                            std::span<const double> input, std::span<double> grad_weight,
                            std::span<double> grad_bias);

}  // namespace serial
}  // namespace afe::kernels
