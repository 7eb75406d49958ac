// OpenMP kernels against their serial references, at the shapes of the
// default 96x96 network.

#include <benchmark/benchmark.h>

#include <vector>

#include "afe/kernels.hpp"
#include "afe/rng.hpp"

namespace k = afe::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  afe::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// conv1 (1->64 @96), conv2 (64->128 @46), conv3 (128->256 @21), scaled down
// in channel count so a single run stays short.
k::ConvDims conv_dims(int stage) {
  switch (stage) {
    case 0: return {1, 96, 96, 64, 5};
    case 1: return {64, 46, 46, 32, 5};
    default: return {128, 21, 21, 64, 5};
  }
}

template <bool Parallel>
void BM_ConvForward(benchmark::State& state) {
  const k::ConvDims d = conv_dims(static_cast<int>(state.range(0)));
  const auto in = random_values(d.input_size(), 1), ker = random_values(d.kernels_size(), 2),
             bias = random_values(d.out_channels, 3);
  std::vector<double> out(d.output_size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::conv2d_forward(d, in, ker, bias, out);
    } else {
      k::serial::conv2d_forward(d, in, ker, bias, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["MAC/s"] = benchmark::Counter(static_cast<double>(d.macs()), benchmark::Counter::kIsIterationInvariantRate);
}

template <bool Parallel>
void BM_ConvBackward(benchmark::State& state) {
  const k::ConvDims d = conv_dims(static_cast<int>(state.range(0)));
  const auto in = random_values(d.input_size(), 1), ker = random_values(d.kernels_size(), 2),
             up = random_values(d.output_size(), 3);
  std::vector<double> gin(d.input_size()), gker(d.kernels_size()), gb(d.out_channels);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::conv2d_backward_input(d, up, ker, gin);
      k::conv2d_backward_params(d, up, in, gker, gb);
    } else {
      k::serial::conv2d_backward_input(d, up, ker, gin);
      k::serial::conv2d_backward_params(d, up, in, gker, gb);
    }
    benchmark::DoNotOptimize(gin.data());
    benchmark::DoNotOptimize(gker.data());
  }
}

template <bool Parallel>
void BM_Linear(benchmark::State& state) {
  const std::size_t rows = 300, cols = 1024;
  const auto w = random_values(rows * cols, 4), x = random_values(cols, 5), b = random_values(rows, 6),
             up = random_values(rows, 7);
  std::vector<double> out(rows), gin(cols), gw(rows * cols), gb(rows);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::linear_forward(rows, cols, w, x, b, out);
      k::linear_backward_input(rows, cols, w, up, gin);
      k::linear_backward_params(rows, cols, up, x, gw, gb);
    } else {
      k::serial::linear_forward(rows, cols, w, x, b, out);
      k::serial::linear_backward_input(rows, cols, w, up, gin);
      k::serial::linear_backward_params(rows, cols, up, x, gw, gb);
    }
    benchmark::DoNotOptimize(gw.data());
  }
}

}  // namespace

BENCHMARK(BM_ConvForward<false>)->Name("conv_forward/serial")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvForward<true>)->Name("conv_forward/openmp")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackward<false>)->Name("conv_backward/serial")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvBackward<true>)->Name("conv_backward/openmp")->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Linear<false>)->Name("linear_300x1024/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Linear<true>)->Name("linear_300x1024/openmp")->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
