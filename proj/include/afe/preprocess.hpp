#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "afe/tensor.hpp"

namespace afe {

/// Per-image mean subtraction and contrast normalization (population std,
/// floored at 1e-6). A constant image maps to all zeros.
Tensor normalize(const Tensor& image);

struct FilledSeries {
  std::vector<double> values;
  std::vector<std::uint8_t> mask;  ///< 1 where the value was filled in
};

/// Linear interpolation across interior runs of missing values; leading and
/// trailing runs hold the nearest present value. Throws if nothing is present.
FilledSeries fill_gaps(std::span<const std::optional<double>> series);
/// Convenience form: `missing[i] != 0` marks entries of `values` to replace.
FilledSeries fill_gaps(std::span<const double> values, std::span<const std::uint8_t> missing);

}  // namespace afe
