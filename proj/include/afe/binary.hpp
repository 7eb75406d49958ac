#pragma once

// Little-endian helpers shared by the model and feature file formats.

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "afe/error.hpp"

namespace afe::binary {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

/// Sequential reader over a byte buffer; every read is bounds-checked.
class Reader {
 public:
  Reader(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw InputError(what_ + ": truncated file");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint64_t u64() {
    const auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[i]);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  bool done() const { return pos_ == bytes_.size(); }
  const std::string& what() const { return what_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::string what_;
};

}  // namespace afe::binary
