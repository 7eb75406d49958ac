#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "afe/tensor.hpp"

namespace afe {

struct NamedTensor {
  std::string name;
  Tensor value;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Ordered collection of named parameters (or gradients, or velocities).
using ParamSet = std::vector<NamedTensor>;

ParamSet zeros_like(const ParamSet& params);
std::size_t parameter_count(const ParamSet& params);
/// a += b; names and shapes must agree.
void accumulate(ParamSet& a, const ParamSet& b);
void scale(ParamSet& a, double factor);
const Tensor& find(const ParamSet& params, const std::string& name);
/// FNV-1a over names, shapes and raw value bits.
std::uint64_t checksum(const ParamSet& params);
void require_same_layout(const ParamSet& a, const ParamSet& b, const std::string& what);

}  // namespace afe
