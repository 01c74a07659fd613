#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "uniloc/geometry.hpp"

namespace uniloc {

// Membership slack for the closed box test and the [0,1] vector range.
inline constexpr double kBoxSlack = 1e-9;

struct PixelDatum {
  Vec2 uv;
  double intensity = 0.0;
};

struct PointDatum {
  Vec3 position;
};

// One sensor element with its predicted (or labeled) mask and instance vector.
// Background elements carry no vector.
struct InstanceElement {
  std::variant<PixelDatum, PointDatum> datum;
  bool foreground = false;
  std::optional<Vec3> vector;
};

enum class CloudSource { StereoPixels, LidarPoints };

struct InstanceCloud {
  CloudSource source = CloudSource::LidarPoints;
  std::vector<InstanceElement> elements;

  std::size_t foreground_count() const;

  // Throws DomainError if a foreground element lacks a vector, has a vector
  // outside [0,1]^3, or carries a datum of the wrong kind.
  void validate() const;
};

InstanceElement make_point_element(const Vec3& p, std::optional<Vec3> vector);
InstanceElement make_pixel_element(const Vec2& uv, double intensity, std::optional<Vec3> vector);

// Object-frame coordinates from a normalized instance vector: v*d - d/2.
Vec3 recover_local(const Vec3& vector, const Vec3& dims);

// Normalized instance vector of a camera-frame point; throws OutsideBoxError
// if the point lies outside the (slightly padded) box.
Vec3 label_vector(const Vec3& p_cam, const ObjectBox3D& box);
std::optional<Vec3> try_label_vector(const Vec3& p_cam, const ObjectBox3D& box);

// Foreground/background labels for raw points against a ground-truth box.
InstanceCloud make_labels(std::span<const Vec3> points, const ObjectBox3D& box);

}  // namespace uniloc
