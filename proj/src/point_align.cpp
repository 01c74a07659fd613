#include "uniloc/point_align.hpp"

#include "uniloc/errors.hpp"

namespace uniloc {

FrustumSelection frustum_filter(std::span<const Vec3> points, const Roi2D& roi, const CameraIntrinsics& k) {
  FrustumSelection sel{roi, {}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i];
    if (!(p.z() > 0.0)) continue;
    if (roi.contains(project(p, k))) sel.kept.push_back(i);
  }
  return sel;
}

PointAlignProblem::PointAlignProblem(InstanceCloud cloud, const Vec3& dims, double yaw)
    : cloud_(std::move(cloud)), dims_(dims), yaw_(normalize_angle(yaw)) {
  if (cloud_.source != CloudSource::LidarPoints) throw DomainError("point alignment needs a lidar cloud");
  if ((dims_.array() <= 0.0).any()) throw DomainError("point alignment: dimensions must be positive");
  cloud_.validate();
  const Mat3 r = yaw_rotation(yaw_);
  for (const InstanceElement& e : cloud_.elements) {
    if (!e.foreground) continue;
    positions_.push_back(std::get<PointDatum>(e.datum).position);
    offsets_.push_back(r * recover_local(*e.vector, dims_));
  }
}

double point_energy(const PointAlignProblem& prob, const Vec3& p_hat) {
  double e = 0.0;
  for (std::size_t i = 0; i < prob.support(); ++i)
    e += (prob.positions()[i] - (p_hat + prob.offsets()[i])).squaredNorm();
  return e;
}

Vec3 solve_center(const PointAlignProblem& prob) {
  if (prob.support() == 0) throw NoSupportError("solve_center: no foreground points");
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < prob.support(); ++i) sum += prob.positions()[i] - prob.offsets()[i];
  return sum / static_cast<double>(prob.support());
}

}  // namespace uniloc
