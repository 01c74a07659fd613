#pragma once

#include <span>
#include <vector>

#include "uniloc/geometry.hpp"

namespace uniloc {

// Regression targets of the monocular box head: 6 + 2k terms plus k bin
// confidences. Confidences are independent sigmoids, not a distribution.
struct BoxResiduals {
  double du = 0.0;
  double dv = 0.0;
  double dz = 0.0;
  Vec3 ddims = Vec3::Zero();
  std::vector<double> bin_conf;
  std::vector<Vec2> bin_offsets;  // (cos, sin) of the offset from each bin center
};

struct DimensionPrior {
  Vec3 mean;
  Vec3 sigma;

  DimensionPrior(const Vec3& mean, const Vec3& sigma);
};

// Overlapping orientation bins. Each bin covers [center - half_width,
// center + half_width] (wrapped).
struct BinLayout {
  std::vector<double> centers;
  double half_width;

  BinLayout(std::vector<double> centers, double half_width);

  // k evenly spaced bins starting at -pi + pi/k; each bin spans `overlap`
  // times its share of the circle.
  static BinLayout uniform(int k, double overlap = 1.1);

  int size() const { return static_cast<int>(centers.size()); }
  bool contains(int bin, double alpha) const;
};

// Encoding used throughout: 4 bins centered at -3pi/4, -pi/4, pi/4, 3pi/4.
BinLayout default_bin_layout();

Vec2 encode_center(const ObjectBox3D& box, const Roi2D& roi, const CameraIntrinsics& k);
Vec3 decode_center(const Vec2& residual, const Roi2D& roi, double z, const CameraIntrinsics& k);

// Depth residual relative to the coarse depth f_y * h / h_roi.
double encode_depth(double z, double height, const Roi2D& roi, const CameraIntrinsics& k);
double decode_depth(double dz, double height, const Roi2D& roi, const CameraIntrinsics& k);

// log((d - p_d) / sigma_d); only defined for d above the prior.
Vec3 encode_dims(const Vec3& dims, const DimensionPrior& prior);
Vec3 decode_dims(const Vec3& ddims, const DimensionPrior& prior);

struct AngleEncoding {
  std::vector<double> conf;
  std::vector<Vec2> offsets;
};

AngleEncoding encode_alpha(double alpha, const BinLayout& layout);
double decode_alpha(std::span<const double> conf, std::span<const Vec2> offsets,
                    const BinLayout& layout);
double decode_alpha(const BoxResiduals& res, const BinLayout& layout);

// Global yaw from observation angle and back; the ray angle is atan2(x, z).
double alpha_to_theta(double alpha, const Vec3& center);
double theta_to_alpha(double theta, const Vec3& center);

// Full box round trip through the residual encoding.
BoxResiduals encode_box(const ObjectBox3D& box, const Roi2D& roi, const CameraIntrinsics& k,
                        const DimensionPrior& prior, const BinLayout& layout);
ObjectBox3D decode_box(const BoxResiduals& res, const Roi2D& roi, const CameraIntrinsics& k,
                       const DimensionPrior& prior, const BinLayout& layout);

}  // namespace uniloc
