#include "afe/kernels.hpp"

#include <cstdint>

namespace afe::kernels {
namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;

}  // namespace

void conv2d_forward(const ConvDims& d, std::span<const double> input, std::span<const double> kernels,
                    std::span<const double> bias, std::span<double> out) {
  const std::size_t oh = d.out_height(), ow = d.out_width(), k = d.kernel;
  const auto n_out = static_cast<std::int64_t>(d.out_channels);
#pragma omp parallel for schedule(static) if (d.macs() > kParallelWork)
  for (std::int64_t o = 0; o < n_out; ++o) {
    double* dst = out.data() + o * oh * ow;
    for (std::size_t p = 0; p < oh * ow; ++p) dst[p] = bias[o];
    for (std::size_t c = 0; c < d.in_channels; ++c) {
      const double* src = input.data() + c * d.height * d.width;
      const double* ker = kernels.data() + (o * d.in_channels + c) * k * k;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const double w = ker[i * k + j];
          for (std::size_t y = 0; y < oh; ++y) {
            const double* row = src + (y + i) * d.width + j;
            double* orow = dst + y * ow;
            for (std::size_t x = 0; x < ow; ++x) orow[x] += row[x] * w;
          }
        }
      }
    }
  }
}

void conv2d_backward_input(const ConvDims& d, std::span<const double> grad_out,
                           std::span<const double> kernels, std::span<double> grad_in) {
  const std::size_t oh = d.out_height(), ow = d.out_width(), k = d.kernel;
  const auto n_in = static_cast<std::int64_t>(d.in_channels);
#pragma omp parallel for schedule(static) if (d.macs() > kParallelWork)
  for (std::int64_t c = 0; c < n_in; ++c) {
    double* dst = grad_in.data() + c * d.height * d.width;
    for (std::size_t p = 0; p < d.height * d.width; ++p) dst[p] = 0.0;
    for (std::size_t o = 0; o < d.out_channels; ++o) {
      const double* g = grad_out.data() + o * oh * ow;
      const double* ker = kernels.data() + (o * d.in_channels + c) * k * k;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const double w = ker[i * k + j];
          for (std::size_t y = 0; y < oh; ++y) {
            const double* grow = g + y * ow;
            double* drow = dst + (y + i) * d.width + j;
            for (std::size_t x = 0; x < ow; ++x) drow[x] += grow[x] * w;
          }
        }
      }
    }
  }
}

void conv2d_backward_params(const ConvDims& d, std::span<const double> grad_out,
                            std::span<const double> input, std::span<double> grad_kernels,
                            std::span<double> grad_bias) {
  const std::size_t oh = d.out_height(), ow = d.out_width(), k = d.kernel;
  const auto n_out = static_cast<std::int64_t>(d.out_channels);
#pragma omp parallel for schedule(static) if (d.macs() > kParallelWork)
  for (std::int64_t o = 0; o < n_out; ++o) {
    const double* g = grad_out.data() + o * oh * ow;
    double gb = 0.0;
    for (std::size_t p = 0; p < oh * ow; ++p) gb += g[p];
    grad_bias[o] = gb;
    for (std::size_t c = 0; c < d.in_channels; ++c) {
      const double* src = input.data() + c * d.height * d.width;
      double* gk = grad_kernels.data() + (o * d.in_channels + c) * k * k;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          double acc = 0.0;
          for (std::size_t y = 0; y < oh; ++y) {
            const double* row = src + (y + i) * d.width + j;
            const double* grow = g + y * ow;
            for (std::size_t x = 0; x < ow; ++x) acc += grow[x] * row[x];
          }
          gk[i * k + j] = acc;
        }
      }
    }
  }
}

void linear_forward(std::size_t rows, std::size_t cols, std::span<const double> weight,
                    std::span<const double> input, std::span<const double> bias, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (rows * cols > kParallelWork)
  for (std::int64_t r = 0; r < n; ++r) {
    const double* w = weight.data() + r * cols;
    double acc = bias[r];
    for (std::size_t c = 0; c < cols; ++c) acc += w[c] * input[c];
    out[r] = acc;
  }
}

void linear_backward_input(std::size_t rows, std::size_t cols, std::span<const double> weight,
                           std::span<const double> grad_out, std::span<double> grad_in) {
  // Parallel over column blocks; each element still sums rows in ascending order.
  constexpr std::size_t kBlock = 64;
  const auto n_blocks = static_cast<std::int64_t>((cols + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (rows * cols > kParallelWork)
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = lo + kBlock < cols ? lo + kBlock : cols;
    for (std::size_t c = lo; c < hi; ++c) grad_in[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* w = weight.data() + r * cols;
      const double g = grad_out[r];
      for (std::size_t c = lo; c < hi; ++c) grad_in[c] += w[c] * g;
    }
  }
}

void linear_backward_params(std::size_t rows, std::size_t cols, std::span<const double> grad_out,
                            std::span<const double> input, std::span<double> grad_weight,
                            std::span<double> grad_bias) {
  const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static) if (rows * cols > kParallelWork)
  for (std::int64_t r = 0; r < n; ++r) {
    const double g = grad_out[r];
    double* gw = grad_weight.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) gw[c] = g * input[c];
    grad_bias[r] = g;
  }
}

}  // namespace afe::kernels
