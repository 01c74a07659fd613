#include "uniloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "uniloc/errors.hpp"

namespace uniloc {

namespace {

std::string describe(const Vec3& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x() << ", " << p.y() << ", " << p.z() << ")";
  return os.str();
}

}  // namespace

double normalize_angle(double a) {
  if (!std::isfinite(a)) throw DomainError("angle is not finite");
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double angle_diff(double a, double b) { return normalize_angle(a - b); }

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_, double cy_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_) {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy))
    throw DomainError("focal lengths must be positive and finite");
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw DomainError("principal point must be finite");
}

CameraIntrinsics CameraIntrinsics::cropped(double ox, double oy) const {
  return {fx, fy, cx - ox, cy - oy};
}

StereoRig::StereoRig(CameraIntrinsics k, double b) : intrinsics(k), baseline(b) {
  if (!(baseline >= 0.0) || !std::isfinite(baseline))
    throw DomainError("stereo baseline must be finite and nonnegative");
}

ObjectBox3D::ObjectBox3D(const Vec3& center, const Vec3& dims, double yaw)
    : center_(center), dims_(dims), yaw_(normalize_angle(yaw)) {
  if (!center_.allFinite()) throw DomainError("box center must be finite");
  if (!dims_.allFinite() || (dims_.array() <= 0.0).any())
    throw DomainError("box dimensions must be strictly positive, got " + describe(dims_));
}

Mat3 ObjectBox3D::rotation() const { return yaw_rotation(yaw_); }

Vec3 ObjectBox3D::to_camera(const Vec3& local) const { return center_ + rotation() * local; }

Vec3 ObjectBox3D::to_local(const Vec3& cam) const { return rotation().transpose() * (cam - center_); }

std::array<Vec3, 8> ObjectBox3D::corners() const {
  std::array<Vec3, 8> out;
  const Mat3 r = rotation();
  int i = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) {
        const Vec3 local(0.5 * sx * dims_.x(), 0.5 * sy * dims_.y(), 0.5 * sz * dims_.z());
        out[i++] = center_ + r * local;
      }
  return out;
}

Roi2D::Roi2D(double u_, double v_, double w_, double h_) : u(u_), v(v_), width(w_), height(h_) {
  if (!(width > 0.0) || !(height > 0.0)) throw DomainError("RoI width and height must be positive");
  if (!std::isfinite(u) || !std::isfinite(v) || !std::isfinite(width) || !std::isfinite(height))
    throw DomainError("RoI must be finite");
}

Roi2D Roi2D::from_bounds(double left, double top, double right, double bottom) {
  return {0.5 * (left + right), 0.5 * (top + bottom), right - left, bottom - top};
}

bool Roi2D::contains(const Vec2& px) const {
  return px.x() >= left() && px.x() <= right() && px.y() >= top() && px.y() <= bottom();
}

Mat3 yaw_rotation(double theta) {
  if (!std::isfinite(theta)) throw DomainError("yaw is not finite");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat3 r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return r;
}

Vec2 project(const Vec3& p, const CameraIntrinsics& k) {
  if (!(p.z() > 0.0)) throw DomainError("cannot project point with nonpositive depth " + describe(p));
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

Vec3 backproject(const Vec2& px, double z, const CameraIntrinsics& k) {
  if (!(z > 0.0)) throw DomainError("cannot back-project with nonpositive depth");
  return {(px.x() - k.cx) * z / k.fx, (px.y() - k.cy) * z / k.fy, z};
}

Roi2D project_box(const ObjectBox3D& box, const CameraIntrinsics& k) {
  double l = std::numeric_limits<double>::infinity(), t = l;
  double r = -l, b = -l;
  for (const Vec3& c : box.corners()) {
    const Vec2 px = project(c, k);
    l = std::min(l, px.x());
    r = std::max(r, px.x());
    t = std::min(t, px.y());
    b = std::max(b, px.y());
  }
  return Roi2D::from_bounds(l, t, r, b);
}

}  // namespace uniloc
