#include "uniloc/fusion.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "uniloc/errors.hpp"

namespace uniloc {

SensorNoise::SensorNoise(double s, double p) : sigma_s(s), sigma_p(p) {
  if (!(sigma_s > 0.0) || !(sigma_p > 0.0) || !std::isfinite(sigma_s) || !std::isfinite(sigma_p))
    throw DomainError("sensor noise deviations must be positive and finite");
}

namespace {

bool has_stereo(const FusionProblem& prob) { return prob.stereo && prob.stereo->support() > 0; }
bool has_points(const FusionProblem& prob) { return prob.points && prob.points->support() > 0; }

struct NormalEquations {
  Mat3 hessian = Mat3::Zero();
  Vec3 gradient = Vec3::Zero();
};

// Gauss-Newton normal equations of the whitened residuals at `center`.
NormalEquations linearize(const FusionProblem& prob, const Vec3& center) {
  NormalEquations ne;
  if (prob.stereo) {
    const StereoProblem& sp = *prob.stereo;
    const CameraIntrinsics& k = sp.rig().intrinsics;
    const double w = 1.0 / (prob.noise.sigma_s * prob.noise.sigma_s);
    for (std::size_t i = 0; i < sp.support(); ++i) {
      const Vec3 p = center + sp.offsets()[i] - sp.rig().baseline_vector();
      if (!(p.z() > 0.0)) continue;
      const Vec2 px = project(p, k);
      const auto right = try_sample_bilinear(sp.right(), px);
      if (!right) continue;
      const double r = sp.left_values()[i] - *right;
      const Vec2 g = gradient_bilinear(sp.right(), px);
      const double iz = 1.0 / p.z();
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << k.fx * iz, 0.0, -k.fx * p.x() * iz * iz,
               0.0, k.fy * iz, -k.fy * p.y() * iz * iz;
      const Eigen::RowVector3d j = -(g.transpose() * dproj);
      ne.hessian += w * j.transpose() * j;
      ne.gradient += w * j.transpose() * r;
    }
  }
  if (prob.points) {
    const PointAlignProblem& pp = *prob.points;
    const double w = 1.0 / (prob.noise.sigma_p * prob.noise.sigma_p);
    for (std::size_t i = 0; i < pp.support(); ++i) {
      const Vec3 r = pp.positions()[i] - center - pp.offsets()[i];
      ne.hessian += w * Mat3::Identity();
      ne.gradient -= w * r;
    }
  }
  return ne;
}

void fill_energies(const FusionProblem& prob, const Vec3& c, SolveReport& report) {
  report.stereo_energy = prob.stereo ? stereo_energy_at(*prob.stereo, c) : 0.0;
  report.point_energy = prob.points ? point_energy(*prob.points, c) : 0.0;
  report.fused_energy = fused_energy(prob, c);
}

}  // namespace

double fused_energy(const FusionProblem& prob, const Vec3& p_hat) {
  double e = 0.0;
  if (prob.stereo) {
    if (!(p_hat.z() > 0.0)) throw DomainError("fused_energy: center must have positive depth");
    e += stereo_energy_at(*prob.stereo, p_hat) / (prob.noise.sigma_s * prob.noise.sigma_s);
  }
  if (prob.points) e += point_energy(*prob.points, p_hat) / (prob.noise.sigma_p * prob.noise.sigma_p);
  return e;
}

FusionResult solve_fused(const FusionProblem& prob, const FusionSolverConfig& cfg) {
  const bool stereo = has_stereo(prob);
  const bool points = has_points(prob);
  if (!stereo && !points) throw NoSupportError("solve_fused: no sensor with foreground support");

  FusionResult out{prob.init, {}};
  SolveReport& report = out.report;

  if (!stereo) {
    // Points alone: the closed form is the exact minimizer.
    FusionProblem only_points{std::nullopt, prob.points, prob.noise, prob.init};
    report.energy_history.push_back(fused_energy(only_points, prob.init));
    out.center = solve_center(*prob.points);
    report.converged = true;
    fill_energies(only_points, out.center, report);
    report.energy_history.push_back(report.fused_energy);
    return out;
  }
  if (!points) {
    FusionProblem only_stereo{prob.stereo, std::nullopt, prob.noise, prob.init};
    report.energy_history.push_back(fused_energy(only_stereo, prob.init));
    const DepthSolution sol = solve_depth(*prob.stereo, cfg.depth);
    out.center = prob.stereo->center_at_depth(sol.depth);
    report.converged = true;
    report.low_confidence = sol.low_confidence;
    fill_energies(only_stereo, out.center, report);
    report.energy_history.push_back(report.fused_energy);
    return out;
  }

  // Both sensors: pick the best start, then damped Gauss-Newton on (x, y, z).
  Vec3 center = prob.init;
  double energy = fused_energy(prob, center);
  report.energy_history.push_back(energy);

  std::vector<Vec3> seeds{solve_center(*prob.points)};
  const DepthSolution ds = solve_depth(*prob.stereo, cfg.depth);
  report.low_confidence = ds.low_confidence;
  seeds.push_back(prob.stereo->center_at_depth(ds.depth));
  for (const Vec3& s : seeds) {
    if (!(s.z() > 0.0)) continue;
    const double e = fused_energy(prob, s);
    if (e < energy) center = s, energy = e;
  }
  report.energy_history.push_back(energy);

  double lambda = cfg.initial_damping;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    report.iterations = it + 1;
    const NormalEquations ne = linearize(prob, center);
    Mat3 damped = ne.hessian;
    const double scale = std::max(ne.hessian.diagonal().maxCoeff(), 1e-12);
    for (int d = 0; d < 3; ++d) damped(d, d) += lambda * (ne.hessian(d, d) + 1e-9 * scale);
    const Vec3 step = damped.ldlt().solve(-ne.gradient);
    if (!step.allFinite()) break;

    const Vec3 candidate = center + step;
    const double e = candidate.z() > 0.0 ? fused_energy(prob, candidate) : HUGE_VAL;
    if (e < energy) {
      center = candidate;
      energy = e;
      report.energy_history.push_back(energy);
      lambda /= cfg.damping_factor;
    } else {
      lambda *= cfg.damping_factor;
    }
    if (step.norm() < cfg.step_tolerance) {
      report.converged = true;
      break;
    }
  }
  out.center = center;
  fill_energies(prob, center, report);
  return out;
}

}  // namespace uniloc
