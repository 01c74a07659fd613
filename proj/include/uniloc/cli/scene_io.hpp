#pragma once

#include <memory>
#include <string>
#include <vector>

#include "uniloc/cli/config.hpp"
#include "uniloc/kitti_io.hpp"
#include "uniloc/synth.hpp"

namespace uniloc::cli {

// Scene directory layout:
//   calib.txt        P0..P3, R0_rect, Tr_velo_to_cam (identity: points are in the camera frame)
//   label_gt.txt     ground truth, 15 fields
//   label_init.txt   monocular initial boxes with detection scores, 16 fields
//   velodyne.bin     float32 x y z intensity
//   image_2/NNN.pgm  left crop of object NNN, 16-bit
//   image_3/NNN.pgm  right crop of object NNN
//   instances.txt    per object: crop origin, predicted pixels, frustum points
//   manifest.txt     seed and noise levels
//   config.txt       resolved run configuration

// Per-object sensor predictions, as consumed by refinement.
struct ObjectInputs {
  StereoView stereo;
  std::vector<std::size_t> frustum;
  InstanceCloud lidar{CloudSource::LidarPoints, {}};
};

struct SceneFiles {
  StereoRig rig{CameraIntrinsics(1.0, 1.0, 0.0, 0.0), 0.0};
  std::vector<KittiLabel> truth;  // empty when the scene has no ground truth
  std::vector<KittiLabel> init;
  std::vector<Vec3> points;
  std::vector<ObjectInputs> objects;  // parallel to init
};

std::vector<KittiLabel> truth_labels(const Scene& scene);
std::vector<KittiLabel> init_labels(const Scene& scene);

// The in-memory equivalent of writing a scene and reading it back.
SceneFiles scene_files(const Scene& scene);

void write_scene(const std::string& dir, const Scene& scene, const RunConfig& cfg);

// Reads the files needed for the selected sensors; missing ones raise IoError.
SceneFiles read_scene(const std::string& dir, bool need_stereo, bool need_lidar);

std::string format_instances(const SceneFiles& files);
// Pixel intensities are left at zero and crop images unset; read_scene
// attaches both. Point elements are built only when need_lidar is set.
std::vector<ObjectInputs> parse_instances(std::string_view text, const std::vector<Vec3>& points, bool need_lidar);

}  // namespace uniloc::cli
