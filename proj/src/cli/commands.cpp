#include "uniloc/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "uniloc/errors.hpp"

namespace uniloc::cli {

namespace fs = std::filesystem;

namespace {

void make_dir(const std::string& dir) {
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    throw IoError("cannot create " + dir + ": " + e.what());
  }
}

std::string in_dir(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

std::vector<KittiLabel> load_labels(const std::string& path) {
  try {
    return parse_labels(read_file(path));
  } catch (const ParseError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace

void cmd_generate(const RunConfig& cfg, const std::string& out_dir) {
  write_scene(out_dir, generate_scene(cfg.scene), cfg);
}

RefineOutput cmd_refine(const std::string& scene_dir, SensorSelection sensors, const RunConfig& cfg,
                        const std::string& out_dir) {
  const SceneFiles scene = read_scene(scene_dir, sensors.stereo, sensors.lidar);
  RefineOutput res = refine_scene(scene, sensors, cfg);
  make_dir(out_dir);
  write_file(in_dir(out_dir, "labels.txt"), write_labels(res.labels));
  write_file(in_dir(out_dir, "report.txt"), format_report(res));
  write_file(in_dir(out_dir, "config.txt"), cfg.dump());
  return res;
}

std::vector<MetricRow> cmd_eval(const std::vector<std::string>& gt_files, const std::vector<std::string>& det_files,
                                const RunConfig& cfg, const std::string& out_dir) {
  if (gt_files.size() != det_files.size())
    throw ConfigError("eval needs one --det file per --gt file (got " + std::to_string(gt_files.size()) + " and " +
                      std::to_string(det_files.size()) + ")");
  DetectionSet gts, dets;
  for (std::size_t i = 0; i < gt_files.size(); ++i) {
    auto g = to_detections(load_labels(gt_files[i]), static_cast<int>(i));
    auto d = to_detections(load_labels(det_files[i]), static_cast<int>(i));
    gts.insert(gts.end(), g.begin(), g.end());
    dets.insert(dets.end(), d.begin(), d.end());
  }
  auto rows = evaluate_all(dets, gts, cfg.eval);
  if (!out_dir.empty()) {
    make_dir(out_dir);
    write_file(in_dir(out_dir, "metrics.txt"), metrics_text(rows, cfg.eval));
    write_file(in_dir(out_dir, "metrics.csv"), metrics_csv(rows));
    write_file(in_dir(out_dir, "config.txt"), cfg.dump());
  }
  return rows;
}

std::string cmd_sweep(const RunConfig& base, const std::string& param, const std::vector<std::string>& values,
                      int seeds, SensorSelection sensors, const std::string& out_dir) {
  if (seeds < 1) throw ConfigError("sweep needs at least one seed");
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  base.get(param);  // rejects unknown keys before any work
  std::string csv = "param,value,seed,sensors,objects,failures,mean_abs_depth_error,center_rmse,ap_bv_car\n";
  for (const auto& value : values) {
    for (int s = 0; s < seeds; ++s) {
      RunConfig cfg = base;
      cfg.set(param, value);
      cfg.scene.seed = base.scene.seed + static_cast<std::uint64_t>(s);
      const SceneFiles files = scene_files(generate_scene(cfg.scene));
      const RefineOutput res = refine_scene(files, sensors, cfg);

      double depth_sum = 0.0, sq_sum = 0.0;
      for (const auto& r : res.reports) {
        depth_sum += r.final_depth_error;
        sq_sum += r.final_error * r.final_error;
      }
      const double n = static_cast<double>(res.reports.size());
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const auto car = average_precision_for(to_detections(res.labels, 0), to_detections(files.truth, 0), "Car",
                                             cfg.eval, IouMetric::BirdsEye);
      csv += param + "," + value + "," + std::to_string(cfg.scene.seed) + "," + to_string(sensors) + "," +
             std::to_string(res.reports.size()) + "," + std::to_string(res.failures) + "," +
             format_fixed(n > 0 ? depth_sum / n : nan) + "," + format_fixed(n > 0 ? std::sqrt(sq_sum / n) : nan) +
             "," + format_fixed(car.has_ground_truth ? car.ap : nan) + "\n";
    }
  }
  make_dir(out_dir);
  write_file(in_dir(out_dir, "sweep.csv"), csv);
  write_file(in_dir(out_dir, "config.txt"), base.dump());
  return csv;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unified stereo/LiDAR 3D box refinement on synthetic KITTI-style scenes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, ap_mode;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--set", overrides, "override one key, e.g. --set noise.point_sigma=0.05")->allow_extra_args(false);
  app.add_option("--seed", seed, "random seed for scene generation");
  app.add_option("--ap-mode", ap_mode, "AP interpolation: 11 or 40")->check(CLI::IsMember({"11", "40"}));

  std::string out_dir, scene_dir, sensors_text = "stereo,lidar", param, values_text;
  std::vector<std::string> gt_files, det_files;
  int seeds = 5;

  auto* gen = app.add_subcommand("generate", "write a synthetic scene directory");
  gen->add_option("--out", out_dir, "scene directory to create")->required();

  auto* ref = app.add_subcommand("refine", "refine the initial boxes of a scene");
  ref->add_option("--scene", scene_dir, "scene directory")->required();
  ref->add_option("--sensors", sensors_text, "mono, stereo, lidar or stereo,lidar")->capture_default_str();
  ref->add_option("--out", out_dir, "output directory")->required();

  auto* ev = app.add_subcommand("eval", "score detections against ground truth");
  ev->add_option("--gt", gt_files, "ground-truth label file, one per frame")->required()->allow_extra_args(false);
  ev->add_option("--det", det_files, "detection label file, one per frame")->required()->allow_extra_args(false);
  ev->add_option("--out", out_dir, "directory for metrics.txt and metrics.csv");

  auto* sw = app.add_subcommand("sweep", "generate/refine/eval over a parameter sweep");
  sw->add_option("--param", param, "configuration key to vary")->required();
  sw->add_option("--values", values_text, "comma-separated values")->required();
  sw->add_option("--seeds", seeds, "scenes per value, from --seed upward")->capture_default_str();
  sw->add_option("--sensors", sensors_text, "mono, stereo, lidar or stereo,lidar")->capture_default_str();
  sw->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (seed) cfg.scene.seed = *seed;
    if (!ap_mode.empty()) cfg.set("eval.ap_mode", ap_mode);
    for (const auto& o : overrides) cfg.apply_override(o);

    if (gen->parsed()) {
      cmd_generate(cfg, out_dir);
      out << "wrote scene (seed " << cfg.scene.seed << ", " << cfg.scene.object_count << " objects) to " << out_dir
          << "\n";
    } else if (ref->parsed()) {
      const SensorSelection sensors = parse_sensors(sensors_text);
      const RefineOutput res = cmd_refine(scene_dir, sensors, cfg, out_dir);
      out << "refined " << res.labels.size() << " objects with " << to_string(sensors) << ", " << res.failures
          << " failed; wrote " << out_dir << "\n";
      for (const auto& r : res.reports)
        if (r.failed) err << "object " << r.index << ": " << r.message << "\n";
      if (res.failures > 0) return kExitSolverFailures;
    } else if (ev->parsed()) {
      out << metrics_text(cmd_eval(gt_files, det_files, cfg, out_dir), cfg.eval);
    } else if (sw->parsed()) {
      std::vector<std::string> values;
      std::size_t pos = 0;
      while (pos <= values_text.size()) {
        auto end = values_text.find(',', pos);
        if (end == std::string::npos) end = values_text.size();
        if (end > pos) values.push_back(values_text.substr(pos, end - pos));
        pos = end + 1;
      }
      out << cmd_sweep(cfg, param, values, seeds, parse_sensors(sensors_text), out_dir);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OvercrowdedError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace uniloc::cli
