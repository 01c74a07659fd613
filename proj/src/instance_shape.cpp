#include "uniloc/instance_shape.hpp"

#include <algorithm>
#include <sstream>

#include "uniloc/errors.hpp"

namespace uniloc {

namespace {

bool in_unit_cube(const Vec3& v, double slack) {
  return v.allFinite() && (v.array() >= -slack).all() && (v.array() <= 1.0 + slack).all();
}

}  // namespace

std::size_t InstanceCloud::foreground_count() const {
  return static_cast<std::size_t>(
      std::count_if(elements.begin(), elements.end(), [](const InstanceElement& e) { return e.foreground; }));
}

void InstanceCloud::validate() const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const InstanceElement& e = elements[i];
    const bool is_pixel = std::holds_alternative<PixelDatum>(e.datum);
    if (is_pixel != (source == CloudSource::StereoPixels))
      throw DomainError("element " + std::to_string(i) + " does not match the cloud source");
    if (!e.foreground) continue;
    if (!e.vector) throw DomainError("foreground element " + std::to_string(i) + " has no instance vector");
    if (!in_unit_cube(*e.vector, 0.0))
      throw DomainError("instance vector of element " + std::to_string(i) + " is outside [0,1]^3");
  }
}

InstanceElement make_point_element(const Vec3& p, std::optional<Vec3> vector) {
  const bool fg = vector.has_value();
  return {PointDatum{p}, fg, std::move(vector)};
}

InstanceElement make_pixel_element(const Vec2& uv, double intensity, std::optional<Vec3> vector) {
  const bool fg = vector.has_value();
  return {PixelDatum{uv, intensity}, fg, std::move(vector)};
}

Vec3 recover_local(const Vec3& vector, const Vec3& dims) {
  if (!in_unit_cube(vector, 0.0)) {
    std::ostringstream os;
    os << "instance vector (" << vector.transpose() << ") is outside [0,1]^3";
    throw DomainError(os.str());
  }
  if ((dims.array() <= 0.0).any()) throw DomainError("recover_local: dimensions must be positive");
  return vector.cwiseProduct(dims) - 0.5 * dims;
}

std::optional<Vec3> try_label_vector(const Vec3& p_cam, const ObjectBox3D& box) {
  const Vec3 local = box.to_local(p_cam);
  const Vec3 v = (local + 0.5 * box.dims()).cwiseQuotient(box.dims());
  if (!in_unit_cube(v, kBoxSlack)) return std::nullopt;
  return v.cwiseMax(0.0).cwiseMin(1.0);
}

Vec3 label_vector(const Vec3& p_cam, const ObjectBox3D& box) {
  if (auto v = try_label_vector(p_cam, box)) return *v;
  std::ostringstream os;
  os.precision(12);
  os << "point (" << p_cam.transpose() << ") lies outside the box";
  throw OutsideBoxError(os.str());
}

InstanceCloud make_labels(std::span<const Vec3> points, const ObjectBox3D& box) {
  InstanceCloud cloud;
  cloud.source = CloudSource::LidarPoints;
  cloud.elements.reserve(points.size());
  for (const Vec3& p : points) cloud.elements.push_back(make_point_element(p, try_label_vector(p, box)));
  return cloud;
}

}  // namespace uniloc
