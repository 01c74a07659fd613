#include "uniloc/cli/config.hpp"

#include <charconv>
#include <functional>
#include <vector>

#include "uniloc/errors.hpp"
#include "uniloc/kitti_io.hpp"

namespace uniloc::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view v) {
  try {
    return parse_double(v);
  } catch (const ParseError&) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
}

int to_int(std::string_view key, std::string_view v) {
  try {
    return static_cast<int>(parse_int(v));
  } catch (const ParseError&) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError(std::string(key) + ": expected an unsigned integer, got '" + std::string(v) + "'");
  return out;
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Get>
Entry number(std::string key, Get field) {
  return {key,
          [key, field](RunConfig& c, std::string_view v) { field(c) = to_double(key, v); },
          [field](const RunConfig& c) { return format_exact(field(c)); }};
}

template <class Get>
Entry integer(std::string key, Get field) {
  return {key,
          [key, field](RunConfig& c, std::string_view v) { field(c) = to_int(key, v); },
          [field](const RunConfig& c) { return std::to_string(field(c)); }};
}

// Intrinsics and baseline are validated as a whole, so they are rebuilt on
// every change.
Entry rig_entry(std::string key, int which) {
  auto read = [which](const StereoRig& r) {
    const auto& k = r.intrinsics;
    const double vals[] = {k.fx, k.fy, k.cx, k.cy, r.baseline};
    return vals[which];
  };
  return {key,
          [key, which](RunConfig& c, std::string_view v) {
            const double x = to_double(key, v);
            auto& r = c.scene.rig;
            double vals[] = {r.intrinsics.fx, r.intrinsics.fy, r.intrinsics.cx, r.intrinsics.cy, r.baseline};
            vals[which] = x;
            try {
              c.scene.rig = StereoRig(CameraIntrinsics(vals[0], vals[1], vals[2], vals[3]), vals[4]);
            } catch (const DomainError& e) {
              throw ConfigError(key + ": " + e.what());
            }
          },
          [read](const RunConfig& c) { return format_exact(read(c.scene.rig)); }};
}

Entry sigma_entry(std::string key, bool stereo) {
  return {key,
          [key, stereo](RunConfig& c, std::string_view v) {
            const double x = to_double(key, v);
            try {
              c.noise = stereo ? SensorNoise(x, c.noise.sigma_p) : SensorNoise(c.noise.sigma_s, x);
            } catch (const DomainError& e) {
              throw ConfigError(key + ": " + e.what());
            }
          },
          [stereo](const RunConfig& c) { return format_exact(stereo ? c.noise.sigma_s : c.noise.sigma_p); }};
}

Entry iou_entry(std::string key, std::string cls) {
  return {key,
          [key, cls](RunConfig& c, std::string_view v) {
            const double x = to_double(key, v);
            if (!(x > 0.0 && x <= 1.0)) throw ConfigError(key + ": IoU threshold must lie in (0,1]");
            c.eval.iou_threshold[cls] = x;
          },
          [cls](const RunConfig& c) { return format_exact(c.eval.threshold_for(cls)); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back({"seed", [](RunConfig& c, std::string_view v) { c.scene.seed = to_u64("seed", v); },
                 [](const RunConfig& c) { return std::to_string(c.scene.seed); }});
    t.push_back(integer("object_count", [](auto& c) -> auto& { return c.scene.object_count; }));
    t.push_back(number("depth_min", [](auto& c) -> auto& { return c.scene.depth_min; }));
    t.push_back(number("depth_max", [](auto& c) -> auto& { return c.scene.depth_max; }));
    t.push_back(rig_entry("fx", 0));
    t.push_back(rig_entry("fy", 1));
    t.push_back(rig_entry("cx", 2));
    t.push_back(rig_entry("cy", 3));
    t.push_back(rig_entry("baseline", 4));
    t.push_back(integer("image_width", [](auto& c) -> auto& { return c.scene.image_width; }));
    t.push_back(integer("image_height", [](auto& c) -> auto& { return c.scene.image_height; }));
    t.push_back(number("camera_height", [](auto& c) -> auto& { return c.scene.camera_height; }));
    t.push_back(integer("points_per_object", [](auto& c) -> auto& { return c.scene.points_per_object; }));
    t.push_back(integer("ground_points", [](auto& c) -> auto& { return c.scene.ground_points; }));
    t.push_back(number("roi_margin", [](auto& c) -> auto& { return c.scene.roi_margin; }));
    t.push_back(number("max_bev_overlap", [](auto& c) -> auto& { return c.scene.max_bev_overlap; }));
    t.push_back({"shape",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "cuboid") c.scene.shape = ShapeModel::Cuboid;
                   else if (v == "carlike") c.scene.shape = ShapeModel::CarLike;
                   else throw ConfigError("shape: expected cuboid or carlike, got '" + std::string(v) + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.scene.shape == ShapeModel::Cuboid ? "cuboid" : "carlike");
                 }});
    t.push_back(integer("texture.frequencies", [](auto& c) -> auto& { return c.scene.texture.frequencies; }));
    t.push_back(number("texture.amplitude", [](auto& c) -> auto& { return c.scene.texture.amplitude; }));
    t.push_back(
        number("texture.wavelength_min", [](auto& c) -> auto& { return c.scene.texture.wavelength_min; }));
    t.push_back(
        number("texture.wavelength_max", [](auto& c) -> auto& { return c.scene.texture.wavelength_max; }));
    t.push_back(number("noise.point_sigma", [](auto& c) -> auto& { return c.scene.noise.point_sigma; }));
    t.push_back(number("noise.vector_sigma", [](auto& c) -> auto& { return c.scene.noise.vector_sigma; }));
    t.push_back(
        number("noise.mask_flip_rate", [](auto& c) -> auto& { return c.scene.noise.mask_flip_rate; }));
    t.push_back(
        number("noise.intensity_sigma", [](auto& c) -> auto& { return c.scene.noise.intensity_sigma; }));
    t.push_back(
        number("noise.init_depth_sigma", [](auto& c) -> auto& { return c.scene.noise.init_depth_sigma; }));
    t.push_back(number("noise.init_lateral_sigma",
                       [](auto& c) -> auto& { return c.scene.noise.init_lateral_sigma; }));
    t.push_back(
        number("noise.init_yaw_sigma", [](auto& c) -> auto& { return c.scene.noise.init_yaw_sigma; }));
    t.push_back(
        number("noise.init_dims_sigma", [](auto& c) -> auto& { return c.scene.noise.init_dims_sigma; }));
    t.push_back(sigma_entry("fusion.sigma_s", true));
    t.push_back(sigma_entry("fusion.sigma_p", false));
    t.push_back(integer("solver.max_iterations", [](auto& c) -> auto& { return c.solver.max_iterations; }));
    t.push_back(number("solver.step_tolerance", [](auto& c) -> auto& { return c.solver.step_tolerance; }));
    t.push_back(number("solver.initial_damping", [](auto& c) -> auto& { return c.solver.initial_damping; }));
    t.push_back(number("solver.damping_factor", [](auto& c) -> auto& { return c.solver.damping_factor; }));
    t.push_back(number("depth.window_ratio", [](auto& c) -> auto& { return c.solver.depth.window_ratio; }));
    t.push_back(integer("depth.grid_points", [](auto& c) -> auto& { return c.solver.depth.grid_points; }));
    t.push_back(
        integer("depth.refine_iterations", [](auto& c) -> auto& { return c.solver.depth.refine_iterations; }));
    t.push_back({"eval.ap_mode",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "11") c.eval.mode = ApMode::Eleven;
                   else if (v == "40") c.eval.mode = ApMode::Forty;
                   else throw ConfigError("eval.ap_mode: expected 11 or 40, got '" + std::string(v) + "'");
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.eval.mode)); }});
    t.push_back(iou_entry("eval.iou_car", "Car"));
    t.push_back(iou_entry("eval.iou_pedestrian", "Pedestrian"));
    t.push_back(iou_entry("eval.iou_cyclist", "Cyclist"));
    return t;
  }();
  return table;
}

const Entry& find(std::string_view key) {
  for (const auto& e : entries())
    if (e.key == key) return e;
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) { find(key).set(*this, trim(value)); }

std::string RunConfig::get(std::string_view key) const { return find(key).get(*this); }

void RunConfig::apply_text(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    set(trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
  }
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& e : entries()) out += e.key + " = " + e.get(*this) + "\n";
  return out;
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  cfg.apply_text(read_file(path));
  return cfg;
}

}  // namespace uniloc::cli
