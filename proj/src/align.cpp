#include "afe/align.hpp"

#include <cmath>
#include <complex>

#include "afe/error.hpp"

namespace afe {

double Similarity::scale() const { return std::hypot(a_re, a_im); }
double Similarity::rotation() const { return std::atan2(a_im, a_re); }

Point Similarity::apply(Point p) const {
  return {a_re * p.x - a_im * p.y + tx, a_im * p.x + a_re * p.y + ty};
}

Point Similarity::invert(Point q) const {
  const std::complex<double> a(a_re, a_im);
  const std::complex<double> p = (std::complex<double>(q.x, q.y) - std::complex<double>(tx, ty)) / a;
  return {p.real(), p.imag()};
}

namespace {

Point centroid(std::span<const Point> pts) {
  Point c;
  for (const auto& p : pts) {
    c.x += p.x;
    c.y += p.y;
  }
  c.x /= static_cast<double>(pts.size());
  c.y /= static_cast<double>(pts.size());
  return c;
}

void require_spread(std::span<const Point> pts, const char* which) {
  const Point c = centroid(pts);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    sxx += (p.x - c.x) * (p.x - c.x);
    syy += (p.y - c.y) * (p.y - c.y);
    sxy += (p.x - c.x) * (p.y - c.y);
  }
  const double trace = sxx + syy;
  // det / (trace/2)^2 is 1 for isotropic spread and 0 for collinear points.
  if (trace <= 0.0 || (sxx * syy - sxy * sxy) <= 1e-12 * trace * trace) {
    throw InputError(std::string("similarity fit: ") + which + " points are collinear or coincident");
  }
}

}  // namespace

Similarity fit_similarity(std::span<const Point> from, std::span<const Point> to) {
  if (from.size() != to.size()) throw InputError("similarity fit: point counts differ");
  if (from.size() < 3) throw InputError("similarity fit: need at least 3 point pairs");
  require_spread(from, "landmark");
  require_spread(to, "template");
  const Point cf = centroid(from), ct = centroid(to);
  std::complex<double> num(0.0, 0.0);
  double den = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    const std::complex<double> p(from[i].x - cf.x, from[i].y - cf.y);
    const std::complex<double> q(to[i].x - ct.x, to[i].y - ct.y);
    num += std::conj(p) * q;
    den += std::norm(p);
  }
  const std::complex<double> a = num / den;
  Similarity s;
  s.a_re = a.real();
  s.a_im = a.imag();
  s.tx = ct.x - (s.a_re * cf.x - s.a_im * cf.y);
  s.ty = ct.y - (s.a_im * cf.x + s.a_re * cf.y);
  return s;
}

double sample_bilinear(std::span<const double> plane, std::size_t width, std::size_t height, double x, double y) {
  const double fx0 = std::floor(x), fy0 = std::floor(y);
  const double fx = x - fx0, fy = y - fy0;
  auto tap = [&](double xi, double yi) {
    if (xi < 0.0 || yi < 0.0 || xi >= static_cast<double>(width) || yi >= static_cast<double>(height)) return 0.0;
    return plane[static_cast<std::size_t>(yi) * width + static_cast<std::size_t>(xi)];
  };
  return (1.0 - fy) * ((1.0 - fx) * tap(fx0, fy0) + fx * tap(fx0 + 1.0, fy0)) +
         fy * ((1.0 - fx) * tap(fx0, fy0 + 1.0) + fx * tap(fx0 + 1.0, fy0 + 1.0));
}

Tensor align_face(const Image& image, const Landmarks& landmarks, const FaceTemplate& tmpl) {
  const Similarity s = fit_similarity(landmarks, tmpl.points);
  const std::vector<double> gray = luminance(image);
  const std::size_t n = tmpl.out_size;
  Tensor out({1, n, n});
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u = 0; u < n; ++u) {
      const Point src = s.invert({static_cast<double>(u), static_cast<double>(v)});
      out.at(0, v, u) = sample_bilinear(gray, image.width, image.height, src.x, src.y);
    }
  }
  return out;
}

}  // namespace afe
