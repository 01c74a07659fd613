#include "uniloc/cli/scene_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "uniloc/errors.hpp"

namespace uniloc::cli {

namespace fs = std::filesystem;

namespace {

std::vector<KittiLabel> reparse(const std::vector<KittiLabel>& labels) { return parse_labels(write_labels(labels)); }

std::string join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

std::string crop_path(const std::string& dir, const char* sub, std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "%03zu.pgm", index);
  return (fs::path(dir) / sub / name).string();
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw IoError("missing input file " + path);
}

template <class Fn>
auto with_file_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw IoError(path + ": " + e.what());
  } catch (const LengthError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::string manifest(const Scene& scene, const RunConfig& cfg) {
  std::string out;
  out += "seed=" + std::to_string(scene.config.seed) + "\n";
  out += "objects=" + std::to_string(scene.objects.size()) + "\n";
  out += "points=" + std::to_string(scene.points.size()) + "\n";
  for (const char* key : {"noise.point_sigma", "noise.vector_sigma", "noise.mask_flip_rate", "noise.intensity_sigma",
                          "noise.init_depth_sigma", "noise.init_lateral_sigma", "noise.init_yaw_sigma",
                          "noise.init_dims_sigma"})
    out += std::string(key) + "=" + cfg.get(key) + "\n";
  return out;
}

}  // namespace

std::vector<KittiLabel> truth_labels(const Scene& scene) {
  std::vector<KittiLabel> out;
  for (const auto& o : scene.objects) {
    out.push_back(box_to_label(o.truth, o.cls, o.bbox));
  }
  return out;
}

std::vector<KittiLabel> init_labels(const Scene& scene) {
  std::vector<KittiLabel> out;
  for (const auto& o : scene.objects) out.push_back(box_to_label(o.init, o.cls, o.roi, o.score));
  return out;
}

SceneFiles scene_files(const Scene& scene) {
  SceneFiles f;
  f.rig = scene.config.rig;
  f.truth = reparse(truth_labels(scene));
  f.init = reparse(init_labels(scene));
  f.points = scene.points;
  for (const auto& o : scene.objects) f.objects.push_back({o.stereo, o.frustum, o.lidar});
  return f;
}

std::string format_instances(const SceneFiles& files) {
  std::string out = "objects " + std::to_string(files.objects.size()) + "\n";
  for (std::size_t i = 0; i < files.objects.size(); ++i) {
    const auto& o = files.objects[i];
    out += "object " + std::to_string(i) + " " + std::to_string(o.stereo.origin_u) + " " +
           std::to_string(o.stereo.origin_v) + " " + std::to_string(o.stereo.pixels.elements.size()) + " " +
           std::to_string(o.frustum.size()) + "\n";
    for (const auto& e : o.stereo.pixels.elements) {
      const auto& px = std::get<PixelDatum>(e.datum);
      out += std::to_string(std::lround(px.uv.x())) + " " + std::to_string(std::lround(px.uv.y()));
      const Vec3 v = e.vector.value_or(Vec3::Zero());
      for (int k = 0; k < 3; ++k) out += " " + std::to_string(std::lround(v[k] * 65535.0));
      out += "\n";
    }
    for (std::size_t j = 0; j < o.frustum.size(); ++j) {
      const auto& e = o.lidar.elements[j];
      out += std::to_string(o.frustum[j]) + (e.foreground ? " 1" : " 0");
      if (e.foreground)
        for (int k = 0; k < 3; ++k) out += " " + format_exact((*e.vector)[k]);
      out += "\n";
    }
  }
  return out;
}

std::vector<ObjectInputs> parse_instances(std::string_view text, const std::vector<Vec3>& points, bool need_lidar) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  std::size_t at = 0;
  auto next = [&](std::size_t min_fields) {
    if (at >= lines.size()) throw ParseError("unexpected end of instance file", at + 1);
    auto f = split_ws(lines[at++]);
    if (f.size() < min_fields) throw ParseError("too few fields", at);
    return f;
  };

  auto head = next(2);
  if (head[0] != "objects") throw ParseError("expected 'objects N'", at);
  const long long count = parse_int(head[1], at);
  if (count < 0) throw ParseError("negative object count", at);

  std::vector<ObjectInputs> out;
  for (long long i = 0; i < count; ++i) {
    auto h = next(6);
    if (h[0] != "object" || parse_int(h[1], at) != i)
      throw ParseError("expected 'object " + std::to_string(i) + "'", at);
    ObjectInputs obj;
    obj.stereo.origin_u = static_cast<int>(parse_int(h[2], at));
    obj.stereo.origin_v = static_cast<int>(parse_int(h[3], at));
    const long long npix = parse_int(h[4], at), npts = parse_int(h[5], at);
    if (npix < 0 || npts < 0) throw ParseError("negative element count", at);
    for (long long j = 0; j < npix; ++j) {
      auto f = next(5);
      Vec3 vec;
      for (int k = 0; k < 3; ++k) {
        const long long q = parse_int(f[2 + k], at);
        if (q < 0 || q > 65535) throw ParseError("vector component outside [0,65535]", at);
        vec[k] = static_cast<double>(q) / 65535.0;
      }
      const Vec2 uv(static_cast<double>(parse_int(f[0], at)), static_cast<double>(parse_int(f[1], at)));
      obj.stereo.pixels.elements.push_back(make_pixel_element(uv, 0.0, vec));
    }
    for (long long j = 0; j < npts; ++j) {
      auto f = next(2);
      if (!need_lidar) continue;
      const long long idx = parse_int(f[0], at);
      if (idx < 0 || static_cast<std::size_t>(idx) >= points.size()) throw ParseError("point index out of range", at);
      const long long fg = parse_int(f[1], at);
      std::optional<Vec3> vec;
      if (fg == 1) {
        if (f.size() < 5) throw ParseError("foreground point without a vector", at);
        vec = Vec3(parse_double(f[2], at), parse_double(f[3], at), parse_double(f[4], at));
      } else if (fg != 0) {
        throw ParseError("foreground flag must be 0 or 1", at);
      }
      obj.frustum.push_back(static_cast<std::size_t>(idx));
      obj.lidar.elements.push_back(make_point_element(points[idx], vec));
    }
    try {
      obj.lidar.validate();
    } catch (const DomainError& e) {
      throw ParseError(std::string("object ") + std::to_string(i) + ": " + e.what(), at);
    }
    out.push_back(std::move(obj));
  }
  return out;
}

void write_scene(const std::string& dir, const Scene& scene, const RunConfig& cfg) {
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    throw IoError("cannot create " + dir + ": " + e.what());
  }
  const SceneFiles files = scene_files(scene);
  write_file(join(dir, "calib.txt"), write_calib(scene.config.rig));
  write_file(join(dir, "label_gt.txt"), write_labels(files.truth));
  write_file(join(dir, "label_init.txt"), write_labels(files.init));

  std::vector<PointXYZI> cloud;
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    const Vec3& p = scene.points[i];
    cloud.push_back({static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z()),
                     scene.point_intensity[i]});
  }
  write_binary_file(join(dir, "velodyne.bin"), write_pointcloud(cloud));
  for (const char* sub : {"image_2", "image_3"}) {
    try {
      fs::create_directories(fs::path(dir) / sub);
    } catch (const fs::filesystem_error& e) {
      throw IoError(std::string("cannot create ") + sub + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& view = scene.objects[i].stereo;
    write_binary_file(crop_path(dir, "image_2", i), write_pgm(*view.left));
    write_binary_file(crop_path(dir, "image_3", i), write_pgm(*view.right));
  }
  write_file(join(dir, "instances.txt"), format_instances(files));
  write_file(join(dir, "manifest.txt"), manifest(scene, cfg));
  write_file(join(dir, "config.txt"), cfg.dump());
}

SceneFiles read_scene(const std::string& dir, bool need_stereo, bool need_lidar) {
  SceneFiles f;
  const std::string calib = join(dir, "calib.txt"), init = join(dir, "label_init.txt");
  const std::string gt = join(dir, "label_gt.txt"), instances = join(dir, "instances.txt");
  require_file(calib);
  require_file(init);
  require_file(instances);
  const KittiCalib kc = with_file_context(calib, [&] { return parse_calib_file(read_file(calib)); });
  f.rig = kc.rig;
  f.init = with_file_context(init, [&] { return parse_labels(read_file(init)); });
  if (fs::is_regular_file(gt)) f.truth = with_file_context(gt, [&] { return parse_labels(read_file(gt)); });

  if (need_lidar) {
    const std::string path = join(dir, "velodyne.bin");
    require_file(path);
    auto raw = with_file_context(path, [&] { return read_pointcloud(read_binary_file(path)); });
    const Mat3 r = kc.velo_to_cam.leftCols<3>();
    const Vec3 t = kc.velo_to_cam.col(3);
    for (const auto& p : raw) f.points.push_back(r * Vec3(p.x, p.y, p.z) + t);
  }
  f.objects = with_file_context(instances, [&] { return parse_instances(read_file(instances), f.points, need_lidar); });
  if (f.objects.size() != f.init.size())
    throw IoError(instances + ": " + std::to_string(f.objects.size()) + " objects but " + init + " has " +
                  std::to_string(f.init.size()) + " labels");

  if (need_stereo) {
    for (std::size_t i = 0; i < f.objects.size(); ++i) {
      auto& view = f.objects[i].stereo;
      for (auto [sub, slot] : {std::pair{"image_2", &view.left}, std::pair{"image_3", &view.right}}) {
        const std::string path = crop_path(dir, sub, i);
        require_file(path);
        *slot = std::make_shared<const IntensityImage>(
            with_file_context(path, [&] { return read_pgm(read_binary_file(path)); }));
      }
      if (view.left->width() != view.right->width() || view.left->height() != view.right->height())
        throw IoError(crop_path(dir, "image_2", i) + ": left and right crops differ in size");
      for (auto& e : view.pixels.elements) {
        auto& px = std::get<PixelDatum>(e.datum);
        if (!view.left->inside(px.uv))
          throw IoError(instances + ": object " + std::to_string(i) + " has a pixel outside its crop");
        px.intensity = view.left->at(static_cast<int>(px.uv.x()), static_cast<int>(px.uv.y()));
      }
    }
  }
  return f;
}

}  // namespace uniloc::cli
