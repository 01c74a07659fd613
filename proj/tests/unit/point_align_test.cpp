#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "scenes.hpp"
#include "support.hpp"
#include "uniloc/errors.hpp"
#include "uniloc/point_align.hpp"

namespace uniloc {
namespace {

using test::uniform;
using test::uniform_vec;

// Points spread through the box volume, labeled against the box itself.
InstanceCloud box_cloud(const ObjectBox3D& box, int m, test::Rng& rng, double noise = 0.0) {
  InstanceCloud c;
  std::normal_distribution<double> n(0.0, noise);
  for (int i = 0; i < m; ++i) {
    const Vec3 v = uniform_vec(rng, 0, 1);
    Vec3 p = box.to_camera(box.dims().cwiseProduct(v) - 0.5 * box.dims());
    if (noise > 0) p += Vec3(n(rng), n(rng), n(rng));
    c.elements.push_back(make_point_element(p, v));
  }
  return c;
}

TEST(FrustumFilter, KeepsRoiCenterDropsBehind) {
  const auto k = test::kitti_like();
  const Roi2D roi(700, 200, 40, 30);
  const std::vector<Vec3> pts{backproject({700, 200}, 12.0, k), {0.0, 0.0, -5.0}, backproject({800, 200}, 5.0, k)};
  const FrustumSelection sel = frustum_filter(pts, roi, k);
  ASSERT_EQ(sel.kept.size(), 1u);
  EXPECT_EQ(sel.kept[0], 0u);
}

TEST(FrustumFilter, MatchesPerPointOracle) {
  const auto k = test::kitti_like();
  test::Rng rng(61);
  std::vector<Vec3> pts;
  for (int i = 0; i < 10000; ++i) pts.push_back({uniform(rng, -30, 30), uniform(rng, -3, 3), uniform(rng, -10, 60)});
  const Roi2D roi(650, 190, 180, 90);
  const FrustumSelection sel = frustum_filter(pts, roi, k);
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3& p = pts[i];
    if (p.z() <= 0) continue;
    const double u = k.fx * p.x() / p.z() + k.cx, v = k.fy * p.y() / p.z() + k.cy;
    if (u >= 560 && u <= 740 && v >= 145 && v <= 235) expected.push_back(i);
  }
  EXPECT_EQ(sel.kept, expected);
  EXPECT_FALSE(expected.empty());
}

TEST(PointEnergy, ZeroAtTruthAndQuadraticAround) {
  test::Rng rng(62);
  const ObjectBox3D box({1.0, 1.2, 14.0}, {1.6, 1.5, 3.9}, 0.8);
  const PointAlignProblem p(box_cloud(box, 300, rng), box.dims(), box.yaw());
  const double e0 = point_energy(p, box.center());
  EXPECT_LT(e0, 1e-18);
  for (int i = 0; i < 50; ++i) {
    const Vec3 d = uniform_vec(rng, -1, 1);
    const double expected = e0 + 300.0 * d.squaredNorm();
    ASSERT_NEAR(point_energy(p, box.center() + d), expected, 1e-9 * expected);
  }
}

TEST(SolveCenter, ExactOnNoiseFreeLabels) {
  test::Rng rng(63);
  for (int i = 0; i < 200; ++i) {
    const ObjectBox3D box = test::random_box(rng);
    const PointAlignProblem p(box_cloud(box, 64, rng), box.dims(), box.yaw());
    ASSERT_LT((solve_center(p) - box.center()).norm(), 1e-9);
  }
}

TEST(SolveCenter, ExactOnCleanSynthScenes) {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const Scene s = generate_scene(test::clean_config(seed));
    for (const auto& o : s.objects) ASSERT_LT((solve_center(make_point_problem(o.lidar, o.truth)) - o.truth.center()).norm(), 1e-9);
  }
}

TEST(SolveCenter, MinimizesEnergy) {
  test::Rng rng(64);
  const ObjectBox3D box({-2.0, 1.0, 20.0}, {1.7, 1.4, 4.1}, -1.1);
  const PointAlignProblem p(box_cloud(box, 256, rng, 0.05), box.dims(), box.yaw());
  const Vec3 c = solve_center(p);
  const double e = point_energy(p, c);
  for (int i = 0; i < 2000; ++i) ASSERT_LE(e, point_energy(p, c + uniform_vec(rng, -0.3, 0.3)));
}

TEST(SolveCenter, MatchesExhaustiveGrid) {
  test::Rng rng(65);
  for (int trial = 0; trial < 5; ++trial) {
    const ObjectBox3D box = test::random_box(rng);
    const PointAlignProblem p(box_cloud(box, 128, rng, 0.05), box.dims(), box.yaw());
    const Vec3 c = solve_center(p);
    Vec3 best = box.center();
    double best_e = point_energy(p, best);
    for (int ix = -50; ix <= 50; ix += 2)
      for (int iy = -50; iy <= 50; iy += 2)
        for (int iz = -50; iz <= 50; iz += 2) {
          const Vec3 q = box.center() + 0.01 * Vec3(ix, iy, iz);
          const double e = point_energy(p, q);
          if (e < best_e) best_e = e, best = q;
        }
    ASSERT_GE(best_e, point_energy(p, c));
    ASSERT_LE((best - c).cwiseAbs().maxCoeff(), 0.02 + 1e-12);
  }
}

TEST(SolveCenter, TranslationEquivariant) {
  test::Rng rng(66);
  const ObjectBox3D box({0.5, 1.0, 18.0}, {0.6, 1.8, 0.8}, 0.2);
  const InstanceCloud c = box_cloud(box, 100, rng, 0.03);
  const Vec3 t(0.7, -0.2, 3.25);
  InstanceCloud moved = c;
  for (auto& e : moved.elements) std::get<PointDatum>(e.datum).position += t;
  const Vec3 a = solve_center(PointAlignProblem(c, box.dims(), box.yaw()));
  const Vec3 b = solve_center(PointAlignProblem(moved, box.dims(), box.yaw()));
  EXPECT_LT((b - a - t).norm(), 1e-12);
}

TEST(SolveCenter, PermutationInvariant) {
  test::Rng rng(67);
  const ObjectBox3D box({0.5, 1.0, 18.0}, {1.6, 1.5, 3.9}, 2.0);
  InstanceCloud c = box_cloud(box, 200, rng, 0.05);
  c.elements.push_back(make_point_element({3, 3, 3}, std::nullopt));
  const Vec3 a = solve_center(PointAlignProblem(c, box.dims(), box.yaw()));
  std::shuffle(c.elements.begin(), c.elements.end(), rng);
  const Vec3 b = solve_center(PointAlignProblem(c, box.dims(), box.yaw()));
  EXPECT_LT((a - b).norm(), 1e-12);
}

TEST(SolveCenter, NoiseAveragesOutAtOneOverRootM) {
  constexpr int kSeeds = 100, kM = 512;
  constexpr double kSigma = 0.05;
  test::Rng rng(68);
  Vec3 sq = Vec3::Zero();
  for (int s = 0; s < kSeeds; ++s) {
    const ObjectBox3D box = test::random_box(rng);
    const Vec3 d = solve_center(PointAlignProblem(box_cloud(box, kM, rng, kSigma), box.dims(), box.yaw())) - box.center();
    sq += d.cwiseProduct(d);
  }
  const double expected = kSigma / std::sqrt(static_cast<double>(kM));
  for (int a = 0; a < 3; ++a) {
    const double rms = std::sqrt(sq[a] / kSeeds);
    EXPECT_GT(rms, expected / 2);
    EXPECT_LT(rms, expected * 2);
  }
}

TEST(SolveCenter, NoForegroundThrows) {
  InstanceCloud c;
  c.elements.push_back(make_point_element({0, 0, 5}, std::nullopt));
  EXPECT_THROW(solve_center(PointAlignProblem(c, {1, 1, 1}, 0.0)), NoSupportError);
  EXPECT_THROW(PointAlignProblem(InstanceCloud{CloudSource::StereoPixels, {}}, {1, 1, 1}, 0.0), DomainError);
}

}  // namespace
}  // namespace uniloc
