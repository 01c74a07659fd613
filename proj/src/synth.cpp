#include "uniloc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "uniloc/errors.hpp"
#include "uniloc/eval.hpp"
#include "uniloc/kitti_io.hpp"

namespace uniloc {

std::vector<ClassSpec> default_classes() {
  return {
      {"Car", 0.7, {1.6, 1.5, 3.9}, {0.08, 0.08, 0.25}},
      {"Pedestrian", 0.15, {0.6, 1.75, 0.8}, {0.05, 0.1, 0.08}},
      {"Cyclist", 0.15, {0.6, 1.75, 1.75}, {0.05, 0.08, 0.1}},
  };
}

NoiseConfig NoiseConfig::defaults() {
  NoiseConfig n;
  n.point_sigma = 0.02;
  n.vector_sigma = 0.005;
  n.mask_flip_rate = 0.01;
  n.intensity_sigma = 0.005;
  n.init_depth_sigma = 0.1;
  n.init_lateral_sigma = 0.01;
  n.init_yaw_sigma = 0.02;
  return n;
}

void SceneConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(object_count >= 0, "object_count must be non-negative");
  require(depth_min > 0.0 && depth_max > depth_min, "need 0 < depth_min < depth_max");
  require(!classes.empty(), "at least one object class is required");
  for (const auto& c : classes) {
    require(c.weight > 0.0, "class weights must be positive");
    require((c.mean_dims.array() > 0.0).all() && (c.dims_sigma.array() >= 0.0).all(),
            "class dimensions must be positive");
  }
  require(image_width >= 2 && image_height >= 2, "image must be at least 2x2");
  require(points_per_object >= 0 && ground_points >= 0, "point counts must be non-negative");
  require(roi_margin >= 0.0, "roi_margin must be non-negative");
  require(max_bev_overlap >= 0.0 && max_bev_overlap <= 1.0, "max_bev_overlap must lie in [0,1]");
  require(texture.frequencies >= 0 && texture.amplitude >= 0.0 && texture.wavelength_min > 0.0 &&
              texture.wavelength_max >= texture.wavelength_min,
          "invalid texture parameters");
  const auto& n = noise;
  require(n.point_sigma >= 0.0 && n.vector_sigma >= 0.0 && n.intensity_sigma >= 0.0 &&
              n.init_depth_sigma >= 0.0 && n.init_lateral_sigma >= 0.0 && n.init_yaw_sigma >= 0.0 &&
              n.init_dims_sigma >= 0.0,
          "noise levels must be non-negative");
  require(n.mask_flip_rate >= 0.0 && n.mask_flip_rate <= 1.0, "mask_flip_rate must lie in [0,1]");
}

namespace {

double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
// Component draws are sequenced so the stream does not depend on argument
// evaluation order.
Vec3 normal_vec(Rng& rng) {
  const double x = normal(rng);
  const double y = normal(rng);
  return {x, y, normal(rng)};
}

Vec3 unit_cube_sample(Rng& rng) {
  const double x = uniform(rng, 0.0, 1.0);
  const double y = uniform(rng, 0.0, 1.0);
  return {x, y, uniform(rng, 0.0, 1.0)};
}

bool bernoulli(Rng& rng, double p) { return p > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

Vec3 to_float(const Vec3& p) {
  return {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z())};
}

double quantize_text(double v) { return parse_double(format_fixed(v)); }

Vec3 quantize_vector(const Vec3& v) {
  Vec3 q;
  for (int k = 0; k < 3; ++k) q[k] = std::round(std::clamp(v[k], 0.0, 1.0) * 65535.0) / 65535.0;
  return q;
}

Vec3 clamp01(const Vec3& v) { return v.cwiseMax(0.0).cwiseMin(1.0); }

Vec3 random_unit(Rng& rng) {
  for (;;) {
    Vec3 d = normal_vec(rng);
    double n = d.norm();
    if (n > 1e-9) return d / n;
  }
}

struct Texture {
  struct Wave {
    Vec3 k;  // direction scaled by 2 pi / wavelength
    double phase;
    double amp;
  };
  std::vector<Wave> waves;

  double operator()(const Vec3& local) const {
    double s = 0.5;
    for (const auto& w : waves) s += w.amp * std::sin(w.k.dot(local) + w.phase);
    return s;
  }
};

Texture make_texture(const TextureConfig& cfg, Rng& rng) {
  Texture t;
  for (int i = 0; i < cfg.frequencies; ++i) {
    Vec3 dir = random_unit(rng);
    double wl = uniform(rng, cfg.wavelength_min, cfg.wavelength_max);
    double phase = uniform(rng, 0.0, 2.0 * kPi);
    t.waves.push_back({dir * (2.0 * kPi / wl), phase, cfg.amplitude / cfg.frequencies});
  }
  return t;
}

double background(double u, double v) {
  return 0.5 + 0.2 * std::sin(0.031 * u + 0.7) * std::sin(0.047 * v + 1.9) + 0.1 * std::sin(0.013 * (u + v));
}

constexpr double kSuperExponent = 4.0;

double super_value(const Vec3& p, const Vec3& h) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += std::pow(std::abs(p[k] / h[k]), kSuperExponent);
  return s - 1.0;
}

Vec3 super_normal(const Vec3& p, const Vec3& h) {
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    double r = p[k] / h[k];
    g[k] = std::copysign(std::pow(std::abs(r), kSuperExponent - 1.0), r) / h[k];
  }
  return g.normalized();
}

struct RayHit {
  Vec3 point;   // camera frame
  Vec3 normal;  // camera frame, outward
  int face;
};

std::optional<RayHit> intersect(ShapeModel shape, const ObjectBox3D& box, const Vec3& origin, const Vec3& dir) {
  Mat3 r = box.rotation();
  Vec3 o = r.transpose() * (origin - box.center());
  Vec3 d = r.transpose() * dir;
  Vec3 h = 0.5 * box.dims();
  double tn = -std::numeric_limits<double>::infinity();
  double tf = std::numeric_limits<double>::infinity();
  int axis = -1;
  double sign = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (std::abs(o[k]) > h[k]) return std::nullopt;
      continue;
    }
    double t1 = (-h[k] - o[k]) / d[k];
    double t2 = (h[k] - o[k]) / d[k];
    double lo = std::min(t1, t2);
    if (lo > tn) {
      tn = lo;
      axis = k;
      sign = d[k] > 0.0 ? -1.0 : 1.0;
    }
    tf = std::min(tf, std::max(t1, t2));
  }
  if (axis < 0 || tn > tf || tn <= 0.0) return std::nullopt;

  if (shape == ShapeModel::Cuboid) {
    Vec3 n = Vec3::Zero();
    n[axis] = sign;
    return RayHit{origin + tn * dir, r * n, 2 * axis + (sign > 0.0 ? 1 : 0)};
  }

  constexpr int kSteps = 96;
  double prev = tn;
  for (int i = 1; i <= kSteps; ++i) {
    double t = tn + (tf - tn) * i / kSteps;
    if (super_value(o + t * d, h) < 0.0) {
      double a = prev, b = t;
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        (super_value(o + m * d, h) < 0.0 ? b : a) = m;
      }
      Vec3 local = o + b * d;
      return RayHit{origin + b * dir, r * super_normal(local, h), 0};
    }
    prev = t;
  }
  return std::nullopt;
}

// Points on the camera-facing surface, in the object frame, pulled a hair
// inside so that float32 rounding keeps them in the box.
std::vector<Vec3> sample_surface(ShapeModel shape, const ObjectBox3D& box, int count, Rng& rng) {
  std::vector<Vec3> out;
  if (count <= 0) return out;
  const Vec3 h = 0.5 * box.dims();
  const Mat3 r = box.rotation();
  constexpr double kInset = 1.0 - 1e-4;

  if (shape == ShapeModel::Cuboid) {
    struct Face {
      int axis;
      double sign;
      double area;
    };
    std::vector<Face> faces;
    for (int a = 0; a < 3; ++a) {
      for (double s : {-1.0, 1.0}) {
        Vec3 n = Vec3::Zero();
        n[a] = s;
        Vec3 c = box.center() + r * (s * h[a] * n.cwiseAbs());
        if ((r * n).dot(c) < 0.0) {
          double area = 4.0 * h[(a + 1) % 3] * h[(a + 2) % 3];
          faces.push_back({a, s, area});
        }
      }
    }
    if (faces.empty()) return out;
    std::vector<double> weights;
    for (const auto& f : faces) weights.push_back(f.area);
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    for (int i = 0; i < count; ++i) {
      const Face& f = faces[pick(rng)];
      Vec3 p;
      for (int k = 0; k < 3; ++k) p[k] = uniform(rng, -h[k], h[k]) * kInset;
      p[f.axis] = f.sign * h[f.axis] * kInset;
      out.push_back(p);
    }
    return out;
  }

  for (int tries = 0; static_cast<int>(out.size()) < count && tries < 200 * count; ++tries) {
    Vec3 u = random_unit(rng);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += std::pow(std::abs(u[k] / h[k]), kSuperExponent);
    Vec3 p = u * std::pow(s, -1.0 / kSuperExponent);
    Vec3 cam = box.to_camera(p);
    if ((r * super_normal(p, h)).dot(cam) < -0.05 * cam.norm()) out.push_back(p * kInset);
  }
  return out;
}

Vec3 pixel_ray(double u, double v, const CameraIntrinsics& k) {
  return {(u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0};
}

bool facing(const RayHit& hit, const Vec3& eye) {
  Vec3 view = hit.point - eye;
  return hit.normal.dot(view) < -0.3 * view.norm();
}

// Pixel rectangle holding the object in both eyes for depths down to 60% of
// the true one, so that searched depths rarely warp off the crop.
struct Crop {
  int ox, oy, w, h;
};

Crop object_crop(const ObjectBox3D& truth, const SceneConfig& cfg) {
  const auto& rig = cfg.rig;
  double l = std::numeric_limits<double>::infinity(), t = l, r = -l, b = -l;
  for (double s : {0.6, 1.0}) {
    const ObjectBox3D moved = truth.with_center(truth.center() * s);
    for (const auto& c : moved.corners()) {
      if (c.z() <= 0.1) continue;
      for (const Vec3& p : {c, Vec3(c - rig.baseline_vector())}) {
        const Vec2 px = project(p, rig.intrinsics);
        l = std::min(l, px.x());
        r = std::max(r, px.x());
        t = std::min(t, px.y());
        b = std::max(b, px.y());
      }
    }
  }
  constexpr double kPad = 4.0;
  const int x0 = std::clamp(static_cast<int>(std::floor(l - kPad)), 0, cfg.image_width - 2);
  const int y0 = std::clamp(static_cast<int>(std::floor(t - kPad)), 0, cfg.image_height - 2);
  const int x1 = std::clamp(static_cast<int>(std::ceil(r + kPad)), x0 + 1, cfg.image_width - 1);
  const int y1 = std::clamp(static_cast<int>(std::ceil(b + kPad)), y0 + 1, cfg.image_height - 1);
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

StereoView render_object(const SceneConfig& cfg, const SceneObject& obj, const Texture& tex, Rng& rng) {
  const ObjectBox3D& truth = obj.truth;
  const Crop crop = object_crop(truth, cfg);
  const Vec3 right_eye = cfg.rig.baseline_vector();
  const auto& k = cfg.rig.intrinsics;
  const std::size_t n = static_cast<std::size_t>(crop.w) * crop.h;
  auto index = [&](int x, int y) { return static_cast<std::size_t>(y) * crop.w + x; };

  std::vector<double> left(n), right(n);
  std::vector<std::optional<RayHit>> left_hits(n);
  std::vector<int> right_face(n, -1);
  for (int y = 0; y < crop.h; ++y) {
    for (int x = 0; x < crop.w; ++x) {
      const double u = crop.ox + x, v = crop.oy + y;
      const std::size_t i = index(x, y);
      const Vec3 dir = pixel_ray(u, v, k);
      left_hits[i] = intersect(cfg.shape, truth, Vec3::Zero(), dir);
      left[i] = left_hits[i] ? tex(truth.to_local(left_hits[i]->point)) : background(u, v);
      const auto rh = intersect(cfg.shape, truth, right_eye, dir);
      if (rh) right_face[i] = rh->face;
      right[i] = rh ? tex(truth.to_local(rh->point)) : background(u, v);
    }
  }
  for (auto* img : {&left, &right}) {
    for (double& val : *img) {
      if (cfg.noise.intensity_sigma > 0.0) val += cfg.noise.intensity_sigma * normal(rng);
      val = quantize_u16(val);
    }
  }

  StereoView view;
  view.origin_u = crop.ox;
  view.origin_v = crop.oy;
  const CameraIntrinsics ck = k.cropped(crop.ox, crop.oy);

  // A left pixel counts as foreground when its surface point faces both
  // cameras and all four right-image neighbours of its warp see the same face.
  auto clean_vector = [&](int x, int y) -> std::optional<Vec3> {
    const auto& hit = left_hits[index(x, y)];
    if (!hit || !facing(*hit, Vec3::Zero()) || !facing(*hit, right_eye)) return std::nullopt;
    const Vec2 q = project(hit->point - right_eye, ck);
    if (q.x() < 0.0 || q.y() < 0.0 || q.x() >= crop.w - 1 || q.y() >= crop.h - 1) return std::nullopt;
    const int x0 = static_cast<int>(std::floor(q.x())), y0 = static_cast<int>(std::floor(q.y()));
    for (int dy = 0; dy <= 1; ++dy)
      for (int dx = 0; dx <= 1; ++dx)
        if (right_face[index(x0 + dx, y0 + dy)] != hit->face) return std::nullopt;
    auto vec = try_label_vector(hit->point, truth);
    if (!vec) return std::nullopt;
    return clamp01(*vec);
  };

  // Predictions only inside the detection RoI.
  const double flip = cfg.noise.mask_flip_rate;
  const double sigma_v = cfg.noise.vector_sigma;
  const int x0 = std::max(0, static_cast<int>(std::ceil(obj.roi.left())) - crop.ox);
  const int y0 = std::max(0, static_cast<int>(std::ceil(obj.roi.top())) - crop.oy);
  const int x1 = std::min(crop.w - 1, static_cast<int>(std::floor(obj.roi.right())) - crop.ox);
  const int y1 = std::min(crop.h - 1, static_cast<int>(std::floor(obj.roi.bottom())) - crop.oy);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double val = left[index(x, y)];
      if (auto vec = clean_vector(x, y)) {
        if (bernoulli(rng, flip)) continue;
        Vec3 noisy = *vec;
        if (sigma_v > 0.0) noisy += sigma_v * normal_vec(rng);
        view.pixels.elements.push_back(make_pixel_element(Vec2(x, y), val, quantize_vector(noisy)));
      } else if (!left_hits[index(x, y)] && bernoulli(rng, flip)) {
        const Vec3 random = unit_cube_sample(rng);
        view.pixels.elements.push_back(make_pixel_element(Vec2(x, y), val, quantize_vector(random)));
      }
    }
  }
  view.left = std::make_shared<IntensityImage>(crop.w, crop.h, std::move(left));
  view.right = std::make_shared<IntensityImage>(crop.w, crop.h, std::move(right));
  return view;
}

bool inside_image(const ObjectBox3D& box, const SceneConfig& cfg) {
  const double m = cfg.roi_margin + 2.0;
  for (const auto& c : box.corners()) {
    if (c.z() <= 0.5) return false;
    for (const Vec3& p : {c, Vec3(c - cfg.rig.baseline_vector())}) {
      Vec2 px = project(p, cfg.rig.intrinsics);
      if (px.x() < m || px.y() < m || px.x() > cfg.image_width - 1 - m || px.y() > cfg.image_height - 1 - m)
        return false;
    }
  }
  return true;
}

bool stable(const ObjectBox3D& q) {
  ObjectBox3D again = quantize_box(q);
  return again.center() == q.center() && again.dims() == q.dims() && again.yaw() == q.yaw();
}

Roi2D detection_roi(const ObjectBox3D& truth, const SceneConfig& cfg) {
  Roi2D r = project_box(truth, cfg.rig.intrinsics);
  const double m = cfg.roi_margin;
  return Roi2D::from_bounds(quantize_text(r.left() - m), quantize_text(r.top() - m), quantize_text(r.right() + m),
                            quantize_text(r.bottom() + m));
}

}  // namespace

ObjectBox3D quantize_box(const ObjectBox3D& box) {
  KittiLabel lbl = box_to_label(box, "Car", Roi2D(0.0, 0.0, 1.0, 1.0));
  return label_to_box(parse_labels(format_label(lbl)).front());
}

ObjectBox3D perturb_box(const ObjectBox3D& box, const NoiseConfig& noise, Rng& rng) {
  for (;;) {
    double dz = normal(rng), dx = normal(rng), dy = normal(rng), dyaw = normal(rng);
    Vec3 dd = normal_vec(rng);
    const Vec3& c = box.center();
    double z = c.z() * (1.0 + noise.init_depth_sigma * dz);
    Vec3 dims = box.dims().cwiseProduct(Vec3::Ones() + noise.init_dims_sigma * dd);
    if (z <= 0.5 || (dims.array() <= 0.0).any()) continue;
    Vec3 center = c * (z / c.z());
    center.x() += noise.init_lateral_sigma * dx;
    center.y() += noise.init_lateral_sigma * dy;
    return ObjectBox3D(center, dims, normalize_angle(box.yaw() + noise.init_yaw_sigma * dyaw));
  }
}

Scene generate_scene(const SceneConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Scene scene;
  scene.config = cfg;

  std::vector<double> weights;
  for (const auto& c : cfg.classes) weights.push_back(c.weight);
  std::discrete_distribution<int> pick_class(weights.begin(), weights.end());

  const auto& k = cfg.rig.intrinsics;
  constexpr int kMaxAttempts = 10000;
  int attempts = 0;
  while (static_cast<int>(scene.objects.size()) < cfg.object_count) {
    if (++attempts > kMaxAttempts)
      throw OvercrowdedError("could not place " + std::to_string(cfg.object_count) + " objects in " +
                             std::to_string(kMaxAttempts) + " attempts");
    const ClassSpec& cls = cfg.classes[pick_class(rng)];
    Vec3 dims;
    for (int i = 0; i < 3; ++i)
      dims[i] = std::max(0.5 * cls.mean_dims[i], cls.mean_dims[i] + cls.dims_sigma[i] * normal(rng));
    double z = uniform(rng, cfg.depth_min, cfg.depth_max);
    double u = uniform(rng, 0.0, cfg.image_width - 1.0);
    double yaw = uniform(rng, -kPi, kPi);
    Vec3 center((u - k.cx) * z / k.fx, cfg.camera_height - 0.5 * dims.y(), z);
    ObjectBox3D truth = quantize_box(ObjectBox3D(center, dims, yaw));
    if (!stable(truth) || !inside_image(truth, cfg)) continue;
    bool clear = true;
    for (const auto& o : scene.objects)
      if (bev_iou(o.truth, truth) > cfg.max_bev_overlap) clear = false;
    if (!clear) continue;
    scene.objects.push_back(
        {cls.name, truth, truth, 1.0, project_box(truth, k), detection_roi(truth, cfg), {}, {}, {}});
  }

  for (auto& obj : scene.objects) {
    do {
      obj.init = quantize_box(perturb_box(obj.truth, cfg.noise, rng));
    } while (!stable(obj.init));
    obj.score = quantize_text(uniform(rng, 0.5, 1.0));
  }

  // LiDAR: camera-facing object surfaces then ground, labels from the clean points.
  std::vector<Vec3> clean;
  for (const auto& obj : scene.objects)
    for (const Vec3& local : sample_surface(cfg.shape, obj.truth, cfg.points_per_object, rng))
      clean.push_back(to_float(obj.truth.to_camera(local)));
  const std::size_t object_points = clean.size();
  const double x_extent = (cfg.image_width - k.cx) * cfg.depth_max / k.fx + 5.0;
  for (int i = 0; i < cfg.ground_points; ++i) {
    Vec3 p(uniform(rng, -x_extent, x_extent), cfg.camera_height,
           uniform(rng, 0.5 * cfg.depth_min, 1.2 * cfg.depth_max));
    bool under = false;
    for (const auto& obj : scene.objects) {
      Vec3 l = obj.truth.to_local(p);
      if (std::abs(l.x()) <= 0.5 * obj.truth.width() + 0.05 && std::abs(l.z()) <= 0.5 * obj.truth.length() + 0.05)
        under = true;
    }
    if (!under) clean.push_back(to_float(p));
  }
  for (std::size_t i = 0; i < clean.size(); ++i) {
    Vec3 p = clean[i];
    if (cfg.noise.point_sigma > 0.0) p += cfg.noise.point_sigma * normal_vec(rng);
    scene.points.push_back(to_float(p));
    scene.point_intensity.push_back(i < object_points ? 0.5f : 0.2f);
  }

  for (auto& obj : scene.objects) {
    obj.frustum = frustum_filter(scene.points, obj.roi, k).kept;
    obj.lidar = InstanceCloud{CloudSource::LidarPoints, {}};
    for (std::size_t idx : obj.frustum) {
      std::optional<Vec3> vec = try_label_vector(clean[idx], obj.truth);
      bool fg = vec.has_value();
      if (bernoulli(rng, cfg.noise.mask_flip_rate)) {
        fg = !fg;
        if (fg) vec = unit_cube_sample(rng);
      } else if (fg && cfg.noise.vector_sigma > 0.0) {
        *vec = clamp01(*vec + cfg.noise.vector_sigma * normal_vec(rng));
      }
      obj.lidar.elements.push_back(make_point_element(scene.points[idx], fg ? vec : std::nullopt));
    }
  }

  for (auto& obj : scene.objects) {
    const Texture tex = make_texture(cfg.texture, rng);
    obj.stereo = render_object(cfg, obj, tex, rng);
  }
  return scene;
}

StereoProblem make_stereo_problem(const StereoRig& rig, const StereoView& view, const ObjectBox3D& init) {
  const StereoRig crop_rig = view.rig(rig);
  return StereoProblem(view.left, view.right, crop_rig, view.pixels, init, project(init.center(), crop_rig.intrinsics));
}

StereoProblem make_stereo_problem(const Scene& scene, const SceneObject& obj) {
  return make_stereo_problem(scene.config.rig, obj.stereo, obj.init);
}

PointAlignProblem make_point_problem(const InstanceCloud& lidar, const ObjectBox3D& init) {
  return PointAlignProblem(lidar, init.dims(), init.yaw());
}

PointAlignProblem make_point_problem(const SceneObject& obj) { return make_point_problem(obj.lidar, obj.init); }

InstanceCloud project_point_labels(const InstanceCloud& points, const CameraIntrinsics& k,
                                   const IntensityImage& image) {
  const std::size_t n = static_cast<std::size_t>(image.width()) * image.height();
  std::vector<double> depth(n, std::numeric_limits<double>::infinity());
  std::vector<const InstanceElement*> owner(n, nullptr);
  for (const auto& e : points.elements) {
    const auto* pt = std::get_if<PointDatum>(&e.datum);
    if (!pt || pt->position.z() <= 0.0) continue;
    Vec2 px = project(pt->position, k);
    long x = std::lround(px.x()), y = std::lround(px.y());
    if (x < 0 || y < 0 || x >= image.width() || y >= image.height()) continue;
    std::size_t i = static_cast<std::size_t>(y) * image.width() + x;
    if (pt->position.z() < depth[i]) {
      depth[i] = pt->position.z();
      owner[i] = &e;
    }
  }
  InstanceCloud out{CloudSource::StereoPixels, {}};
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const InstanceElement* e = owner[static_cast<std::size_t>(y) * image.width() + x];
      if (!e) continue;
      out.elements.push_back(make_pixel_element(Vec2(x, y), image.at(x, y), e->foreground ? e->vector : std::nullopt));
    }
  }
  return out;
}

}  // namespace uniloc
