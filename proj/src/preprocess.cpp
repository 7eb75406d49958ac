#include "afe/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "afe/error.hpp"

namespace afe {

Tensor normalize(const Tensor& image) {
  if (image.empty()) throw ShapeError("normalize: empty image");
  Tensor out = image;
  const auto v = image.data();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo == *hi) {
    out.fill(0.0);
    return out;
  }
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double denom = std::max(std::sqrt(var / n), 1e-6);
  for (double& x : out.data()) x = (x - mean) / denom;
  return out;
}

FilledSeries fill_gaps(std::span<const std::optional<double>> series) {
  const std::size_t n = series.size();
  FilledSeries out{std::vector<double>(n, 0.0), std::vector<std::uint8_t>(n, 0)};
  std::size_t prev = n;  // index of the last present value, n if none yet
  for (std::size_t i = 0; i < n; ++i) {
    if (!series[i]) {
      out.mask[i] = 1;
      continue;
    }
    out.values[i] = *series[i];
    if (prev == n) {
      for (std::size_t k = 0; k < i; ++k) out.values[k] = *series[i];
    } else if (i > prev + 1) {
      const double a = *series[prev], b = *series[i];
      const double span = static_cast<double>(i - prev);
      for (std::size_t k = prev + 1; k < i; ++k) {
        out.values[k] = a + (b - a) * (static_cast<double>(k - prev) / span);
      }
    }
    prev = i;
  }
  if (prev == n) throw InputError("fill_gaps: every value is missing");
  for (std::size_t k = prev + 1; k < n; ++k) out.values[k] = *series[prev];
  return out;
}

FilledSeries fill_gaps(std::span<const double> values, std::span<const std::uint8_t> missing) {
  if (values.size() != missing.size()) throw ShapeError("fill_gaps: values and mask lengths differ");
  std::vector<std::optional<double>> series(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!missing[i]) series[i] = values[i];
  }
  return fill_gaps(series);
}

}  // namespace afe
