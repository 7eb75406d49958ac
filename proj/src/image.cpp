#include "afe/image.hpp"

#include <cctype>
#include <string>

#include "afe/error.hpp"
#include "afe/model_io.hpp"

namespace afe {
namespace {

class HeaderScanner {
 public:
  explicit HeaderScanner(std::string_view bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw InputError("pnm: truncated header");
    return std::string(bytes_.substr(start, pos_ - start));
  }

  std::size_t number() {
    const std::string t = token();
    std::size_t v = 0;
    for (char ch : t) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw InputError("pnm: bad header field '" + t + "'");
      v = v * 10 + static_cast<std::size_t>(ch - '0');
    }
    return v;
  }

  /// Position of the raster: exactly one whitespace byte after maxval.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw InputError("pnm: missing whitespace before raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image decode_pnm(std::string_view bytes) {
  HeaderScanner scan(bytes);
  const std::string magic = scan.token();
  Image img;
  if (magic == "P5") {
    img.channels = 1;
  } else if (magic == "P6") {
    img.channels = 3;
  } else {
    throw InputError("pnm: unsupported format '" + magic + "' (expected P5 or P6)");
  }
  img.width = scan.number();
  img.height = scan.number();
  const std::size_t maxval = scan.number();
  if (img.width == 0 || img.height == 0) throw InputError("pnm: zero image extent");
  if (maxval != 255) throw InputError("pnm: maxval must be 255, got " + std::to_string(maxval));
  const std::size_t start = scan.raster_start();
  const std::size_t n = img.width * img.height * img.channels;
  if (bytes.size() < start + n) throw InputError("pnm: raster is truncated");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                    bytes.begin() + static_cast<std::ptrdiff_t>(start + n));
  return img;
}

Image read_pnm(const std::filesystem::path& path) {
  try {
    return decode_pnm(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string encode_pnm(const Image& image) {
  if (image.channels != 1 && image.channels != 3) throw InputError("pnm: channels must be 1 or 3");
  std::string out = (image.channels == 1 ? "P5\n" : "P6\n") + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

void write_pnm(const std::filesystem::path& path, const Image& image) { write_file(path, encode_pnm(image)); }

std::vector<double> luminance(const Image& image) {
  const std::size_t n = image.width * image.height;
  std::vector<double> out(n);
  if (image.channels == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = image.pixels[i] / 255.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto* px = &image.pixels[3 * i];
      out[i] = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) / 255.0;
    }
  }
  return out;
}

}  // namespace afe
