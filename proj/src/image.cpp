#include "uniloc/image.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uniloc/errors.hpp"

namespace uniloc {

IntensityImage::IntensityImage(int width, int height, double fill)
    : IntensityImage(width, height,
                     std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill)) {}

IntensityImage::IntensityImage(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width_ < 2 || height_ < 2) throw DomainError("image must be at least 2x2");
  if (values_.size() != static_cast<std::size_t>(width_) * height_)
    throw DomainError("image value count does not match its size");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("image values must be finite");
}

std::optional<double> try_sample_bilinear(const IntensityImage& img, const Vec2& px) {
  if (!img.inside(px)) return std::nullopt;
  const int x0 = std::min(static_cast<int>(px.x()), img.width() - 2);
  const int y0 = std::min(static_cast<int>(px.y()), img.height() - 2);
  const double ax = px.x() - x0;
  const double ay = px.y() - y0;
  const double top = (1.0 - ax) * img.at(x0, y0) + ax * img.at(x0 + 1, y0);
  const double bot = (1.0 - ax) * img.at(x0, y0 + 1) + ax * img.at(x0 + 1, y0 + 1);
  return (1.0 - ay) * top + ay * bot;
}

double sample_bilinear(const IntensityImage& img, const Vec2& px) {
  if (auto v = try_sample_bilinear(img, px)) return *v;
  std::ostringstream os;
  os << "sample (" << px.x() << ", " << px.y() << ") outside " << img.width() << "x" << img.height() << " image";
  throw OutOfImageError(os.str());
}

Vec2 gradient_bilinear(const IntensityImage& img, const Vec2& px) {
  auto axis = [&](int dim) {
    Vec2 lo = px, hi = px;
    const double limit = dim == 0 ? img.width() - 1 : img.height() - 1;
    lo[dim] = std::max(0.0, px[dim] - 1.0);
    hi[dim] = std::min(limit, px[dim] + 1.0);
    const double span = hi[dim] - lo[dim];
    if (span <= 0.0) return 0.0;
    return (sample_bilinear(img, hi) - sample_bilinear(img, lo)) / span;
  };
  return {axis(0), axis(1)};
}

}  // namespace uniloc
