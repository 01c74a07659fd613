#pragma once

#include <array>

#include <Eigen/Core>

namespace uniloc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

// Smallest signed difference a - b, in (-pi, pi].
double angle_diff(double a, double b);

// Pinhole intrinsics of a rectified camera. Pixel (u, v) with integer
// coordinates is the center of that pixel.
struct CameraIntrinsics {
  double fx;
  double fy;
  double cx;
  double cy;

  CameraIntrinsics(double fx, double fy, double cx, double cy);

  // Intrinsics of the sub-image whose top-left pixel sits at (ox, oy).
  CameraIntrinsics cropped(double ox, double oy) const;
};

// Two rectified cameras sharing intrinsics; the right eye sits at
// [baseline, 0, 0] in the left camera frame.
struct StereoRig {
  CameraIntrinsics intrinsics;
  double baseline;

  StereoRig(CameraIntrinsics k, double baseline);

  bool degenerate() const { return baseline == 0.0; }
  Vec3 baseline_vector() const { return {baseline, 0.0, 0.0}; }
};

// Camera frame: x right, y down, z forward. Object frame axes are scaled by
// dims = (w, h, l) in that order; yaw rotates the object frame about camera y.
class ObjectBox3D {
 public:
  ObjectBox3D(const Vec3& center, const Vec3& dims, double yaw);

  const Vec3& center() const { return center_; }
  const Vec3& dims() const { return dims_; }
  double yaw() const { return yaw_; }

  double width() const { return dims_.x(); }
  double height() const { return dims_.y(); }
  double length() const { return dims_.z(); }

  Mat3 rotation() const;

  ObjectBox3D with_center(const Vec3& c) const { return {c, dims_, yaw_}; }

  Vec3 to_camera(const Vec3& local) const;
  Vec3 to_local(const Vec3& cam) const;

  std::array<Vec3, 8> corners() const;

 private:
  Vec3 center_;
  Vec3 dims_;
  double yaw_;
};

// Axis-aligned 2D region given by its center and size, in pixels.
struct Roi2D {
  double u;
  double v;
  double width;
  double height;

  Roi2D(double u, double v, double width, double height);
  static Roi2D from_bounds(double left, double top, double right, double bottom);

  double left() const { return u - 0.5 * width; }
  double right() const { return u + 0.5 * width; }
  double top() const { return v - 0.5 * height; }
  double bottom() const { return v + 0.5 * height; }

  // Closed bounds.
  bool contains(const Vec2& px) const;
};

Mat3 yaw_rotation(double theta);

Vec2 project(const Vec3& p, const CameraIntrinsics& k);
Vec3 backproject(const Vec2& px, double z, const CameraIntrinsics& k);

// Tight bounding rectangle of the projected box corners.
Roi2D project_box(const ObjectBox3D& box, const CameraIntrinsics& k);

}  // namespace uniloc
