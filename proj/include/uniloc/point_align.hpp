#pragma once

#include <span>
#include <vector>

#include "uniloc/geometry.hpp"
#include "uniloc/instance_shape.hpp"

namespace uniloc {

struct FrustumSelection {
  Roi2D roi;
  std::vector<std::size_t> kept;
};

// Points in front of the camera whose projection falls in the RoI (closed).
FrustumSelection frustum_filter(std::span<const Vec3> points, const Roi2D& roi, const CameraIntrinsics& k);

// Center-only alignment of an instance-labeled point cloud; dims and yaw are
// the regressed values and stay constant.
class PointAlignProblem {
 public:
  PointAlignProblem(InstanceCloud cloud, const Vec3& dims, double yaw);

  const InstanceCloud& cloud() const { return cloud_; }
  const Vec3& dims() const { return dims_; }
  double yaw() const { return yaw_; }

  std::size_t support() const { return positions_.size(); }

  // Foreground points and their rotated local coordinates R(yaw) * o_i.
  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<Vec3>& offsets() const { return offsets_; }

 private:
  InstanceCloud cloud_;
  Vec3 dims_;
  double yaw_;
  std::vector<Vec3> positions_;
  std::vector<Vec3> offsets_;
};

// Sum of squared distances between observed points and the shape placed at p_hat.
double point_energy(const PointAlignProblem& prob, const Vec3& p_hat);

// Closed-form minimizer of point_energy.
Vec3 solve_center(const PointAlignProblem& prob);

}  // namespace uniloc
