#pragma once

#include <optional>
#include <vector>

#include "uniloc/point_align.hpp"
#include "uniloc/stereo_align.hpp"

namespace uniloc {

// Standard deviations used to whiten each sensor's residuals.
struct SensorNoise {
  double sigma_s = 0.05;  // image intensity, [0,1] units
  double sigma_p = 0.03;  // point position, meters

  SensorNoise() = default;
  SensorNoise(double sigma_s, double sigma_p);
};

struct FusionProblem {
  std::optional<StereoProblem> stereo;
  std::optional<PointAlignProblem> points;
  SensorNoise noise;
  Vec3 init = Vec3::Zero();
};

struct FusionSolverConfig {
  int max_iterations = 50;
  double step_tolerance = 1e-4;  // meters
  double initial_damping = 1e-2;
  double damping_factor = 10.0;
  DepthSearchConfig depth;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  bool low_confidence = false;
  // Fused energy at the initial center, then after every accepted update.
  std::vector<double> energy_history;
  double stereo_energy = 0.0;
  double point_energy = 0.0;
  double fused_energy = 0.0;
};

struct FusionResult {
  Vec3 center;
  SolveReport report;
};

// E_s / sigma_s^2 + E_p / sigma_p^2, omitting absent sensors. The stereo term
// is evaluated at the full center, not only along the anchor ray.
double fused_energy(const FusionProblem& prob, const Vec3& p_hat);

// Single-sensor problems reduce to solve_center / solve_depth. With both
// sensors the center is refined jointly by damped Gauss-Newton, started from
// the best of the initial center, the closed-form point solution and the
// depth-only stereo solution.
FusionResult solve_fused(const FusionProblem& prob, const FusionSolverConfig& cfg = {});

}  // namespace uniloc
