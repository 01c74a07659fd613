#pragma once

#include <memory>
#include <vector>

#include "uniloc/geometry.hpp"
#include "uniloc/image.hpp"
#include "uniloc/instance_shape.hpp"

namespace uniloc {

// Cost charged for a foreground pixel whose warp leaves the right image:
// the largest squared difference two unit-range intensities can have.
inline constexpr double kOutOfImagePenalty = 1.0;

// Depth-only photometric refinement of one object. Dimensions and yaw come
// from the initial box and stay fixed; the center moves along the ray
// through the projection anchor.
class StereoProblem {
 public:
  StereoProblem(std::shared_ptr<const IntensityImage> left, std::shared_ptr<const IntensityImage> right,
                StereoRig rig, InstanceCloud cloud, ObjectBox3D box, Vec2 anchor);

  const IntensityImage& left() const { return *left_; }
  const IntensityImage& right() const { return *right_; }
  const StereoRig& rig() const { return rig_; }
  const InstanceCloud& cloud() const { return cloud_; }
  const ObjectBox3D& box() const { return box_; }
  const Vec2& anchor() const { return anchor_; }

  std::size_t support() const { return offsets_.size(); }

  // R(yaw) * recover_local(v_i, dims), one per foreground pixel.
  const std::vector<Vec3>& offsets() const { return offsets_; }
  // I_l(u_i), one per foreground pixel.
  const std::vector<double>& left_values() const { return left_values_; }

  Vec3 center_at_depth(double z) const;

 private:
  std::shared_ptr<const IntensityImage> left_;
  std::shared_ptr<const IntensityImage> right_;
  StereoRig rig_;
  InstanceCloud cloud_;
  ObjectBox3D box_;
  Vec2 anchor_;
  std::vector<Vec3> offsets_;
  std::vector<double> left_values_;
};

// Per-pixel photometric residuals I_l(u_i) - I_r(warp_i) at a given object
// center. Pixels that warp outside the right image have no residual and are
// counted instead.
struct StereoResiduals {
  std::vector<double> residuals;
  std::vector<bool> in_image;
  std::size_t out_of_image = 0;

  double energy() const;
};

// Right-image pixel a foreground element lands on when the object sits at
// `center`; nullopt when it falls behind the right camera.
std::optional<Vec2> warp_to_right(const StereoProblem& prob, std::size_t i, const Vec3& center);

StereoResiduals stereo_residuals(const StereoProblem& prob, const Vec3& center);

double stereo_energy_at(const StereoProblem& prob, const Vec3& center);
double stereo_energy(const StereoProblem& prob, double z_hat);

struct DepthSearchConfig {
  double window_ratio = 0.3;
  int grid_points = 64;
  int refine_iterations = 3;

  double grid_step(double z_init) const;
  // Depth resolution after refinement: final parabolic bracket half-width.
  double tolerance(double z_init) const;
};

struct DepthSolution {
  double depth = 0.0;
  double energy = 0.0;
  // Energy flat over the search window (no texture, no parallax signal).
  bool low_confidence = false;
};

// Grid search over [z0(1-r), z0(1+r)] followed by parabolic refinement.
DepthSolution solve_depth(const StereoProblem& prob, const DepthSearchConfig& cfg = {});

}  // namespace uniloc
