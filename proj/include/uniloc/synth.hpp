#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "uniloc/geometry.hpp"
#include "uniloc/image.hpp"
#include "uniloc/instance_shape.hpp"
#include "uniloc/point_align.hpp"
#include "uniloc/stereo_align.hpp"

namespace uniloc {

// Seeded stand-in for the learned predictors: sampled objects, their LiDAR
// returns, rendered stereo crops and noisy mask/instance-vector predictions.

using Rng = std::mt19937_64;

struct ClassSpec {
  std::string name;
  double weight;
  Vec3 mean_dims;   // (w, h, l)
  Vec3 dims_sigma;
};

std::vector<ClassSpec> default_classes();

enum class ShapeModel { Cuboid, CarLike };

struct TextureConfig {
  int frequencies = 8;
  double amplitude = 0.35;       // peak deviation from mid-gray, summed over sinusoids
  double wavelength_min = 1.0;   // meters
  double wavelength_max = 3.0;
};

struct NoiseConfig {
  double point_sigma = 0.0;      // meters
  double vector_sigma = 0.0;     // instance-vector units
  double mask_flip_rate = 0.0;
  double intensity_sigma = 0.0;  // [0,1] intensity units
  // Simulated monocular initialization error.
  double init_depth_sigma = 0.0;    // relative, applied along the viewing ray
  double init_lateral_sigma = 0.0;  // meters, on x and y
  double init_yaw_sigma = 0.0;      // radians
  double init_dims_sigma = 0.0;     // relative, per dimension

  static NoiseConfig defaults();
};

struct SceneConfig {
  std::uint64_t seed = 0;
  int object_count = 8;
  double depth_min = 8.0;
  double depth_max = 30.0;
  std::vector<ClassSpec> classes = default_classes();
  StereoRig rig{CameraIntrinsics(700.0, 700.0, 600.0, 180.0), 0.54};
  int image_width = 1242;
  int image_height = 375;
  double camera_height = 1.65;  // ground plane at y = camera_height
  int points_per_object = 256;
  int ground_points = 2000;
  double roi_margin = 3.0;       // pixels added around the projected box
  double max_bev_overlap = 0.05;
  ShapeModel shape = ShapeModel::Cuboid;
  TextureConfig texture;
  NoiseConfig noise = NoiseConfig::defaults();

  void validate() const;
};

// Left/right crops around one object, rendered with that object alone.
struct StereoView {
  int origin_u = 0;  // full-image position of the crop's top-left pixel
  int origin_v = 0;
  std::shared_ptr<const IntensityImage> left;
  std::shared_ptr<const IntensityImage> right;
  // Predicted foreground pixels, in crop coordinates.
  InstanceCloud pixels{CloudSource::StereoPixels, {}};

  // The rig as seen by the crops: same baseline, shifted principal point.
  StereoRig rig(const StereoRig& full) const {
    return {full.intrinsics.cropped(origin_u, origin_v), full.baseline};
  }
};

struct SceneObject {
  std::string cls;
  ObjectBox3D truth;
  ObjectBox3D init;
  double score = 1.0;
  Roi2D bbox;                        // projected ground-truth box
  Roi2D roi;                         // the 2D detection
  std::vector<std::size_t> frustum;  // indices into Scene::points
  InstanceCloud lidar;               // one element per frustum index
  StereoView stereo;
};

struct Scene {
  SceneConfig config;
  std::vector<Vec3> points;  // camera frame, float32-representable
  std::vector<float> point_intensity;
  std::vector<SceneObject> objects;
};

Scene generate_scene(const SceneConfig& cfg);

// Monocular-style error: depth scaled along the viewing ray, then lateral,
// yaw and relative size noise. Redraws until depth and dims stay positive.
ObjectBox3D perturb_box(const ObjectBox3D& box, const NoiseConfig& noise, Rng& rng);

// The value a box takes after a round trip through a label file.
ObjectBox3D quantize_box(const ObjectBox3D& box);

// Anchored at the projection of the initial center.
StereoProblem make_stereo_problem(const StereoRig& rig, const StereoView& view, const ObjectBox3D& init);
StereoProblem make_stereo_problem(const Scene& scene, const SceneObject& obj);
PointAlignProblem make_point_problem(const InstanceCloud& lidar, const ObjectBox3D& init);
PointAlignProblem make_point_problem(const SceneObject& obj);

// Sparse image labels from labeled points: every pixel hit by a projected
// point takes that point's mask and vector, the nearest point winning.
InstanceCloud project_point_labels(const InstanceCloud& points, const CameraIntrinsics& k,
                                   const IntensityImage& image);

}  // namespace uniloc
