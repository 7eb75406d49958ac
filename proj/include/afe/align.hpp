#pragma once

#include <span>

#include "afe/dataset.hpp"
#include "afe/image.hpp"
#include "afe/tensor.hpp"

namespace afe {

/// q = s R(theta) p + t, stored as the complex factor a = s e^{i theta}.
struct Similarity {
  double a_re = 1.0;
  double a_im = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  double scale() const;
  double rotation() const;  ///< radians
  Point apply(Point p) const;
  Point invert(Point q) const;
};

/// Least-squares similarity mapping `from[i]` onto `to[i]`. Needs at least
/// three pairs; throws InputError when either point set is collinear.
Similarity fit_similarity(std::span<const Point> from, std::span<const Point> to);

/// Bilinear sample of a row-major plane at (x, y); taps outside the plane read as 0.
double sample_bilinear(std::span<const double> plane, std::size_t width, std::size_t height, double x, double y);

/// Warps the face so that its landmarks land on the template points and
/// returns the grayscale crop as a [1, out_size, out_size] tensor in [0, 1].
Tensor align_face(const Image& image, const Landmarks& landmarks, const FaceTemplate& tmpl);

}  // namespace afe
