#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uniloc/geometry.hpp"

namespace uniloc {

enum class Difficulty { Easy, Moderate, Hard, All };
enum class ApMode { Eleven, Forty };
enum class IouMetric { BirdsEye, Box3D };

const char* to_string(Difficulty d);
const char* to_string(ApMode m);
const char* to_string(IouMetric m);

struct Detection {
  int frame = 0;
  std::string cls;
  ObjectBox3D box;
  double score = 1.0;
  // Fields used for difficulty tagging.
  double height_2d = std::numeric_limits<double>::infinity();
  int occluded = 0;
  double truncated = 0.0;
};

using DetectionSet = std::vector<Detection>;

struct EvalConfig {
  std::map<std::string, double> iou_threshold{{"Car", 0.7}, {"Pedestrian", 0.5}, {"Cyclist", 0.5}};
  ApMode mode = ApMode::Eleven;

  double threshold_for(const std::string& cls) const;
};

// Rotated-rectangle IoU of the (w x l) ground footprints.
double bev_iou(const ObjectBox3D& a, const ObjectBox3D& b);
double bev_intersection_area(const ObjectBox3D& a, const ObjectBox3D& b);
double iou_3d(const ObjectBox3D& a, const ObjectBox3D& b);

// KITTI devkit regimes: minimum 2D height 40/25/25 px, maximum occlusion
// 0/1/2 and maximum truncation 0.15/0.30/0.50. A label belongs to every
// regime whose limits it meets.
bool meets_difficulty(double height_2d, int occluded, double truncated, Difficulty d);

struct PrPoint {
  double precision;
  double recall;
};

double interpolated_ap(std::span<const PrPoint> curve, ApMode mode);

struct ApResult {
  std::string cls;
  double ap = 0.0;
  // False when the class has no ground truth; ap is then reported as 0.
  bool has_ground_truth = false;
  int num_gt = 0;
  int num_det = 0;
  std::vector<PrPoint> curve;
};

// Per-class AP over all frames. Detections are matched greedily in
// descending score order to the unmatched same-frame ground truth with the
// highest IoU at or above the class threshold.
std::vector<ApResult> average_precision(const DetectionSet& dets, const DetectionSet& gts, const EvalConfig& cfg,
                                        IouMetric metric = IouMetric::BirdsEye,
                                        Difficulty difficulty = Difficulty::All);

ApResult average_precision_for(const DetectionSet& dets, const DetectionSet& gts, const std::string& cls,
                               const EvalConfig& cfg, IouMetric metric = IouMetric::BirdsEye,
                               Difficulty difficulty = Difficulty::All);

struct MetricRow {
  std::string cls;
  Difficulty difficulty;
  IouMetric metric;
  ApResult result;
};

// Every class present in either set, for all difficulties and both metrics.
std::vector<MetricRow> evaluate_all(const DetectionSet& dets, const DetectionSet& gts, const EvalConfig& cfg);

std::string metrics_text(const std::vector<MetricRow>& rows, const EvalConfig& cfg);
// Header "class,difficulty,metric,value"; AP in [0,1].
std::string metrics_csv(const std::vector<MetricRow>& rows);

}  // namespace uniloc
