#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "afe/params.hpp"
#include "afe/rng.hpp"
#include "afe/tensor.hpp"

namespace afe::test {

inline Tensor random_tensor(const Shape& shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(shape);
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

/// Values bounded away from zero, so ReLU kinks are never crossed by a
/// finite-difference step.
inline Tensor off_kink_tensor(const Shape& shape, Rng& rng) {
  Tensor t(shape);
  for (auto& v : t.data()) {
    const double m = rng.uniform(0.05, 1.0);
    v = rng.bernoulli(0.5) ? m : -m;
  }
  return t;
}

/// Distinct values spaced 1e-2 apart in random order, so no pooling block has
/// a tie within a finite-difference step.
inline Tensor distinct_tensor(const Shape& shape, Rng& rng) {
  Tensor t(shape);
  std::vector<double> vals(t.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = 0.01 * static_cast<double>(i) - 0.3;
  rng.shuffle(vals);
  std::copy(vals.begin(), vals.end(), t.data().begin());
  return t;
}

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
  return std::fabs(analytic - numeric) / scale;
}

/// Largest relative error between `analytic` and the central difference of
/// `loss` with respect to every element of `x` (perturbed in place).
inline double fd_max_error(Tensor& x, const Tensor& analytic, const std::function<double()>& loss,
                           double eps = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + eps;
    const double up = loss();
    x[i] = keep - eps;
    const double down = loss();
    x[i] = keep;
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * eps)));
  }
  return worst;
}

/// Same check for every tensor of a parameter set.
inline double fd_max_error(ParamSet& params, const ParamSet& analytic, const std::function<double()>& loss,
                           double eps = 1e-5) {
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    worst = std::max(worst, fd_max_error(params[k].value, analytic[k].value, loss, eps));
  }
  return worst;
}

inline double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace afe::test
