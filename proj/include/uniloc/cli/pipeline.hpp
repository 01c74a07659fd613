#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uniloc/cli/config.hpp"
#include "uniloc/cli/scene_io.hpp"
#include "uniloc/eval.hpp"

namespace uniloc::cli {

// Which refinement sensors are plugged in. Neither means the monocular
// initial boxes pass through unchanged.
struct SensorSelection {
  bool stereo = false;
  bool lidar = false;
};

// Accepts "mono", "stereo", "lidar", "stereo,lidar" (either order) or "fused".
SensorSelection parse_sensors(std::string_view text);
std::string to_string(SensorSelection s);

struct ObjectReport {
  int index = 0;
  std::string cls;
  bool failed = false;
  std::string message;
  double initial_error = 0.0;  // center distance to ground truth; NaN without it
  double final_error = 0.0;
  double initial_depth_error = 0.0;
  double final_depth_error = 0.0;
  double initial_energy = 0.0;  // fused energy; NaN for monocular runs
  double final_energy = 0.0;
  int iterations = 0;
  bool converged = false;
  bool low_confidence = false;
};

struct RefineOutput {
  std::vector<KittiLabel> labels;
  std::vector<ObjectReport> reports;
  int failures = 0;
};

// Objects whose solve throws keep their initial box and are reported as
// failed; the rest of the scene is still refined.
RefineOutput refine_scene(const SceneFiles& scene, SensorSelection sensors, const RunConfig& cfg);

std::string format_report(const RefineOutput& out);

// Labels of one frame as evaluation input; difficulty fields come from the
// label's bbox height, occlusion and truncation.
DetectionSet to_detections(std::span<const KittiLabel> labels, int frame);

}  // namespace uniloc::cli
