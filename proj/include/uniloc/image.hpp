#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uniloc/geometry.hpp"

namespace uniloc {

// Row-major grayscale image, nominally in [0,1].
class IntensityImage {
 public:
  IntensityImage(int width, int height, double fill = 0.0);
  IntensityImage(int width, int height, std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }

  double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  double& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const double> values() const { return values_; }

  bool inside(const Vec2& px) const {
    return px.x() >= 0.0 && px.y() >= 0.0 && px.x() <= width_ - 1 && px.y() <= height_ - 1;
  }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

// Bilinear interpolation, exact at integer coordinates. Throws
// OutOfImageError outside [0, w-1] x [0, h-1].
double sample_bilinear(const IntensityImage& img, const Vec2& px);
std::optional<double> try_sample_bilinear(const IntensityImage& img, const Vec2& px);

// Central-difference gradient of the bilinear surface (one-sided at borders).
Vec2 gradient_bilinear(const IntensityImage& img, const Vec2& px);

}  // namespace uniloc
