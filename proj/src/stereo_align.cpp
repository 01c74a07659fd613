#include "uniloc/stereo_align.hpp"

#include <algorithm>
#include <cmath>

#include "uniloc/errors.hpp"

namespace uniloc {

StereoProblem::StereoProblem(std::shared_ptr<const IntensityImage> left,
                             std::shared_ptr<const IntensityImage> right, StereoRig rig, InstanceCloud cloud,
                             ObjectBox3D box, Vec2 anchor)
    : left_(std::move(left)),
      right_(std::move(right)),
      rig_(rig),
      cloud_(std::move(cloud)),
      box_(box),
      anchor_(anchor) {
  if (!left_ || !right_) throw DomainError("stereo problem needs both images");
  if (cloud_.source != CloudSource::StereoPixels) throw DomainError("stereo problem needs a pixel cloud");
  cloud_.validate();
  const Mat3 r = box_.rotation();
  for (const InstanceElement& e : cloud_.elements) {
    if (!e.foreground) continue;
    const auto& px = std::get<PixelDatum>(e.datum);
    offsets_.push_back(r * recover_local(*e.vector, box_.dims()));
    left_values_.push_back(sample_bilinear(*left_, px.uv));
  }
}

Vec3 StereoProblem::center_at_depth(double z) const { return backproject(anchor_, z, rig_.intrinsics); }

double StereoResiduals::energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i)
    if (in_image[i]) e += residuals[i] * residuals[i];
  return e + kOutOfImagePenalty * static_cast<double>(out_of_image);
}

std::optional<Vec2> warp_to_right(const StereoProblem& prob, std::size_t i, const Vec3& center) {
  const Vec3 p = center + prob.offsets()[i] - prob.rig().baseline_vector();
  if (!(p.z() > 0.0)) return std::nullopt;
  return project(p, prob.rig().intrinsics);
}

StereoResiduals stereo_residuals(const StereoProblem& prob, const Vec3& center) {
  StereoResiduals out;
  const std::size_t n = prob.support();
  out.residuals.assign(n, 0.0);
  out.in_image.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = warp_to_right(prob, i, center);
    const auto right = w ? try_sample_bilinear(prob.right(), *w) : std::nullopt;
    if (!right) {
      ++out.out_of_image;
      continue;
    }
    out.residuals[i] = prob.left_values()[i] - *right;
    out.in_image[i] = true;
  }
  return out;
}

double stereo_energy_at(const StereoProblem& prob, const Vec3& center) {
  double e = 0.0;
  const Vec3 b = prob.rig().baseline_vector();
  const CameraIntrinsics& k = prob.rig().intrinsics;
  for (std::size_t i = 0; i < prob.support(); ++i) {
    const Vec3 p = center + prob.offsets()[i] - b;
    std::optional<double> right;
    if (p.z() > 0.0) right = try_sample_bilinear(prob.right(), project(p, k));
    if (!right) {
      e += kOutOfImagePenalty;
      continue;
    }
    const double r = prob.left_values()[i] - *right;
    e += r * r;
  }
  return e;
}

double stereo_energy(const StereoProblem& prob, double z_hat) {
  if (!(z_hat > 0.0)) throw DomainError("stereo_energy: depth must be positive");
  return stereo_energy_at(prob, prob.center_at_depth(z_hat));
}

double DepthSearchConfig::grid_step(double z_init) const {
  return 2.0 * window_ratio * z_init / (grid_points - 1);
}

double DepthSearchConfig::tolerance(double z_init) const {
  // Iteration i brackets with half-width step / 2^i; without refinement the
  // grid spacing alone sets the resolution.
  if (refine_iterations == 0) return 0.5 * grid_step(z_init);
  return grid_step(z_init) / std::pow(2.0, refine_iterations - 1);
}

DepthSolution solve_depth(const StereoProblem& prob, const DepthSearchConfig& cfg) {
  if (prob.rig().degenerate()) throw DegenerateError("solve_depth: zero stereo baseline gives no parallax");
  if (prob.support() == 0) throw NoSupportError("solve_depth: no foreground pixels");
  if (cfg.grid_points < 3 || !(cfg.window_ratio > 0.0) || !(cfg.window_ratio < 1.0) || cfg.refine_iterations < 0)
    throw DomainError("solve_depth: invalid search configuration");
  const double z0 = prob.box().center().z();
  if (!(z0 > 0.0)) throw DomainError("solve_depth: initial depth must be positive");

  const double lo = z0 * (1.0 - cfg.window_ratio);
  const double hi = z0 * (1.0 + cfg.window_ratio);
  const double step = cfg.grid_step(z0);

  std::vector<double> grid(cfg.grid_points);
  for (int i = 0; i < cfg.grid_points; ++i) grid[i] = stereo_energy(prob, lo + step * i);

  const auto [min_it, max_it] = std::minmax_element(grid.begin(), grid.end());
  const double e_min = *min_it, e_max = *max_it;
  if (e_max - e_min <= 1e-12 * std::max(1.0, e_max)) return {z0, stereo_energy(prob, z0), true};

  const auto best_index = static_cast<int>(min_it - grid.begin());
  double z = lo + step * best_index;
  double e = e_min;
  double h = step;
  for (int it = 0; it < cfg.refine_iterations; ++it) {
    // Three-point bracket around z, shifted inward at the window edges.
    const double x0 = std::clamp(z - h, lo, hi - 2.0 * h);
    const double xs[3] = {x0, x0 + h, x0 + 2.0 * h};
    double fs[3];
    for (int j = 0; j < 3; ++j) fs[j] = xs[j] == z ? e : stereo_energy(prob, xs[j]);

    double best_z = z, best_e = e;
    for (int j = 0; j < 3; ++j)
      if (fs[j] < best_e) best_z = xs[j], best_e = fs[j];

    const double curvature = fs[0] - 2.0 * fs[1] + fs[2];
    if (curvature > 0.0) {
      const double vertex = std::clamp(xs[1] + 0.5 * h * (fs[0] - fs[2]) / curvature, xs[0], xs[2]);
      const double ev = stereo_energy(prob, vertex);
      if (ev < best_e) best_z = vertex, best_e = ev;
    }
    z = best_z;
    e = best_e;
    h *= 0.5;
  }
  // The start is always a candidate, so the solve never ends above it.
  const double e0 = stereo_energy(prob, z0);
  if (e0 < e) return {z0, e0, false};
  return {z, e, false};
}

}  // namespace uniloc
