#include "afe/params.hpp"

#include <cstring>

#include "afe/error.hpp"

namespace afe {

ParamSet zeros_like(const ParamSet& params) {
  ParamSet out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back({p.name, Tensor(p.value.shape())});
  return out;
}

std::size_t parameter_count(const ParamSet& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value.size();
  return n;
}

void require_same_layout(const ParamSet& a, const ParamSet& b, const std::string& what) {
  if (a.size() != b.size()) {
    throw ShapeError(what + ": " + std::to_string(a.size()) + " tensors vs " + std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].value.shape() != b[i].value.shape()) {
      throw ShapeError(what + ": tensor " + a[i].name + shape_string(a[i].value.shape()) +
                       " does not match " + b[i].name + shape_string(b[i].value.shape()));
    }
  }
}

void accumulate(ParamSet& a, const ParamSet& b) {
  require_same_layout(a, b, "accumulate");
  for (std::size_t i = 0; i < a.size(); ++i) a[i].value += b[i].value;
}

void scale(ParamSet& a, double factor) {
  for (auto& p : a) p.value *= factor;
}

const Tensor& find(const ParamSet& params, const std::string& name) {
  for (const auto& p : params) {
    if (p.name == name) return p.value;
  }
  throw InputError("no parameter named '" + name + "'");
}

std::uint64_t checksum(const ParamSet& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& p : params) {
    feed(p.name.data(), p.name.size());
    for (std::size_t e : p.value.shape()) feed(&e, sizeof e);
    feed(p.value.data().data(), p.value.size() * sizeof(double));
  }
  return h;
}

}  // namespace afe
