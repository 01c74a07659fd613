#include "uniloc/cli/pipeline.hpp"

#include <cmath>
#include <limits>

#include "uniloc/errors.hpp"
#include "uniloc/fusion.hpp"

namespace uniloc::cli {

SensorSelection parse_sensors(std::string_view text) {
  if (text == "mono" || text == "none") return {};
  if (text == "fused") return {true, true};
  SensorSelection s;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view part = text.substr(pos, end - pos);
    if (part == "stereo" && !s.stereo) s.stereo = true;
    else if (part == "lidar" && !s.lidar) s.lidar = true;
    else throw ConfigError("invalid sensor list '" + std::string(text) + "'");
    pos = end + 1;
  }
  return s;
}

std::string to_string(SensorSelection s) {
  if (s.stereo && s.lidar) return "stereo,lidar";
  if (s.stereo) return "stereo";
  if (s.lidar) return "lidar";
  return "mono";
}

RefineOutput refine_scene(const SceneFiles& scene, SensorSelection sensors, const RunConfig& cfg) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  RefineOutput out;
  const bool have_truth = scene.truth.size() == scene.init.size();
  for (std::size_t i = 0; i < scene.init.size(); ++i) {
    const KittiLabel& init_label = scene.init[i];
    const ObjectBox3D init = label_to_box(init_label);
    ObjectReport rep;
    rep.index = static_cast<int>(i);
    rep.cls = init_label.type;
    rep.initial_energy = rep.final_energy = nan;
    Vec3 center = init.center();

    if (sensors.stereo || sensors.lidar) {
      try {
        FusionProblem prob;
        prob.noise = cfg.noise;
        prob.init = init.center();
        if (sensors.stereo)
          prob.stereo = make_stereo_problem(scene.rig, scene.objects[i].stereo, init);
        if (sensors.lidar) prob.points = make_point_problem(scene.objects[i].lidar, init);
        FusionResult res = solve_fused(prob, cfg.solver);
        center = res.center;
        rep.initial_energy = res.report.energy_history.front();
        rep.final_energy = res.report.fused_energy;
        rep.iterations = res.report.iterations;
        rep.converged = res.report.converged;
        rep.low_confidence = res.report.low_confidence;
      } catch (const std::exception& e) {
        rep.failed = true;
        rep.message = e.what();
        ++out.failures;
      }
    } else {
      rep.converged = true;
    }

    const ObjectBox3D refined = init.with_center(center);
    const Roi2D bbox = Roi2D::from_bounds(init_label.bbox[0], init_label.bbox[1], init_label.bbox[2],
                                          init_label.bbox[3]);
    KittiLabel lbl = box_to_label(refined, init_label.type, bbox, init_label.score);
    lbl.truncated = init_label.truncated;
    lbl.occluded = init_label.occluded;
    out.labels.push_back(std::move(lbl));

    if (have_truth) {
      const Vec3 t = label_to_box(scene.truth[i]).center();
      rep.initial_error = (init.center() - t).norm();
      rep.final_error = (center - t).norm();
      rep.initial_depth_error = std::abs(init.center().z() - t.z());
      rep.final_depth_error = std::abs(center.z() - t.z());
    } else {
      rep.initial_error = rep.final_error = rep.initial_depth_error = rep.final_depth_error = nan;
    }
    out.reports.push_back(std::move(rep));
  }
  return out;
}

std::string format_report(const RefineOutput& out) {
  std::string s =
      "index\tclass\tstatus\tinitial_error\tfinal_error\tinitial_depth_error\tfinal_depth_error\t"
      "initial_energy\tfinal_energy\titerations\tconverged\tlow_confidence\tmessage\n";
  for (const auto& r : out.reports) {
    std::string msg = r.message;
    for (char& c : msg)
      if (c == '\t' || c == '\n') c = ' ';
    s += std::to_string(r.index) + "\t" + r.cls + "\t" + (r.failed ? "failed" : "ok") + "\t" +
         format_fixed(r.initial_error) + "\t" + format_fixed(r.final_error) + "\t" +
         format_fixed(r.initial_depth_error) + "\t" + format_fixed(r.final_depth_error) + "\t" +
         format_exact(r.initial_energy) + "\t" + format_exact(r.final_energy) + "\t" + std::to_string(r.iterations) +
         "\t" + (r.converged ? "1" : "0") + "\t" + (r.low_confidence ? "1" : "0") + "\t" + msg + "\n";
  }
  return s;
}

DetectionSet to_detections(std::span<const KittiLabel> labels, int frame) {
  DetectionSet out;
  for (const auto& l : labels) {
    if (l.type == "DontCare") continue;
    Detection d{frame, l.type, label_to_box(l), l.score.value_or(1.0)};
    d.height_2d = l.bbox[3] - l.bbox[1];
    d.occluded = l.occluded;
    d.truncated = l.truncated;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace uniloc::cli
