#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"
#include "uniloc/eval.hpp"

namespace uniloc {
namespace {

using test::uniform;

// Monte-Carlo estimate of the footprint (or volume) IoU by uniform sampling
// of the joint bounding region.
double mc_iou(const ObjectBox3D& a, const ObjectBox3D& b, bool volume, int samples, test::Rng& rng) {
  auto inside = [volume](const ObjectBox3D& box, const Vec3& p) {
    const Vec3 l = box.to_local(p);
    if (std::abs(l.x()) > 0.5 * box.width() || std::abs(l.z()) > 0.5 * box.length()) return false;
    return !volume || std::abs(l.y()) <= 0.5 * box.height();
  };
  Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
  for (const ObjectBox3D* box : {&a, &b})
    for (const Vec3& c : box->corners()) lo = lo.cwiseMin(c), hi = hi.cwiseMax(c);
  long both = 0, either = 0;
  for (int i = 0; i < samples; ++i) {
    Vec3 p(uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()), uniform(rng, lo.z(), hi.z()));
    if (!volume) p.y() = a.center().y();
    const bool ia = inside(a, p), ib = inside(b, p);
    both += ia && ib;
    either += ia || ib;
  }
  return either ? static_cast<double>(both) / either : 0.0;
}

// Box pairs with substantial overlap so the Monte-Carlo estimate is tight.
std::pair<ObjectBox3D, ObjectBox3D> overlapping_pair(test::Rng& rng) {
  const ObjectBox3D a({uniform(rng, -2, 2), uniform(rng, 0, 1), uniform(rng, 10, 20)},
                      {uniform(rng, 1, 2), uniform(rng, 1, 2), uniform(rng, 1, 4)}, uniform(rng, -kPi, kPi));
  const ObjectBox3D b(a.center() + Vec3(uniform(rng, -0.8, 0.8), uniform(rng, -0.5, 0.5), uniform(rng, -0.8, 0.8)),
                      {uniform(rng, 1, 2), uniform(rng, 1, 2), uniform(rng, 1, 4)}, uniform(rng, -kPi, kPi));
  return {a, b};
}

Detection det(int frame, const ObjectBox3D& box, double score, std::string cls = "Car") {
  Detection d{frame, std::move(cls), box, score};
  d.height_2d = 60.0;
  return d;
}

TEST(BevIou, IdenticalAndDisjoint) {
  const ObjectBox3D a({0, 1, 10}, {1.6, 1.5, 3.9}, 0.3);
  EXPECT_NEAR(bev_iou(a, a), 1.0, 1e-12);
  EXPECT_EQ(bev_iou(a, a.with_center({10, 1, 10})), 0.0);
}

TEST(BevIou, RotatedUnitSquareMatchesMonteCarlo) {
  const ObjectBox3D a({0, 0, 10}, {1, 1, 1}, 0.0), b({0, 0, 10}, {1, 1, 1}, kPi / 4);
  // Closed form: the overlap is a regular octagon of area 2(sqrt2 - 1).
  const double octagon = 2.0 * (std::sqrt(2.0) - 1.0);
  EXPECT_NEAR(bev_iou(a, b), octagon / (2.0 - octagon), 1e-12);
  test::Rng rng(71);
  EXPECT_NEAR(bev_iou(a, b), mc_iou(a, b, false, 1000000, rng), 1e-3);
}

TEST(BevIou, SymmetricBoundedAndRigidInvariant) {
  test::Rng rng(72);
  for (int i = 0; i < 500; ++i) {
    auto [a, b] = overlapping_pair(rng);
    const double ab = bev_iou(a, b);
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
    ASSERT_NEAR(ab, bev_iou(b, a), 1e-12);
    const double phi = uniform(rng, -kPi, kPi);
    const Vec3 t(uniform(rng, -5, 5), uniform(rng, -1, 1), uniform(rng, -5, 5));
    const Mat3 r = yaw_rotation(phi);
    const ObjectBox3D a2(r * a.center() + t, a.dims(), a.yaw() + phi), b2(r * b.center() + t, b.dims(), b.yaw() + phi);
    ASSERT_NEAR(bev_iou(a2, b2), ab, 1e-9);
    ASSERT_NEAR(iou_3d(a2, b2), iou_3d(a, b), 1e-9);
  }
}

TEST(BevIou, RandomPairsMatchMonteCarlo) {
  test::Rng rng(73);
  for (int i = 0; i < 10; ++i) {
    auto [a, b] = overlapping_pair(rng);
    ASSERT_NEAR(bev_iou(a, b), mc_iou(a, b, false, 400000, rng), 3e-3);
  }
}

TEST(Iou3d, IdenticalAndHalfVerticalOverlap) {
  const ObjectBox3D a({0, 0, 10}, {1, 1, 1}, 0.0);
  EXPECT_NEAR(iou_3d(a, a), 1.0, 1e-12);
  EXPECT_NEAR(iou_3d(a, a.with_center({0, 0.5, 10})), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(iou_3d(a, a.with_center({0, 1.5, 10})), 0.0);
}

TEST(Iou3d, RandomPairsMatchMonteCarlo) {
  test::Rng rng(74);
  for (int i = 0; i < 10; ++i) {
    auto [a, b] = overlapping_pair(rng);
    ASSERT_NEAR(iou_3d(a, b), mc_iou(a, b, true, 400000, rng), 3e-3);
  }
}

TEST(Difficulty, KittiRegimes) {
  EXPECT_TRUE(meets_difficulty(40, 0, 0.15, Difficulty::Easy));
  EXPECT_FALSE(meets_difficulty(39.9, 0, 0.0, Difficulty::Easy));
  EXPECT_TRUE(meets_difficulty(25, 1, 0.3, Difficulty::Moderate));
  EXPECT_FALSE(meets_difficulty(25, 2, 0.3, Difficulty::Moderate));
  EXPECT_TRUE(meets_difficulty(25, 2, 0.5, Difficulty::Hard));
  EXPECT_FALSE(meets_difficulty(24, 0, 0.0, Difficulty::Hard));
  EXPECT_TRUE(meets_difficulty(1, 3, 1.0, Difficulty::All));
}

TEST(AveragePrecision, PerfectAndEmpty) {
  test::Rng rng(75);
  DetectionSet gts;
  for (int i = 0; i < 12; ++i) gts.push_back(det(i % 3, test::random_box(rng), uniform(rng, 0, 1)));
  const EvalConfig cfg;
  EXPECT_DOUBLE_EQ(average_precision_for(gts, gts, "Car", cfg).ap, 1.0);
  EXPECT_DOUBLE_EQ(average_precision_for({}, gts, "Car", cfg).ap, 0.0);
  EXPECT_DOUBLE_EQ(average_precision_for(gts, gts, "Car", EvalConfig{cfg.iou_threshold, ApMode::Forty}).ap, 1.0);
}

// Two ground truths; detections ranked: hit (0.9), miss (0.8), hit (0.7).
TEST(AveragePrecision, ThreeDetectionStepThrough) {
  const ObjectBox3D g1({-3, 1, 15}, {1.6, 1.5, 3.9}, 0.0), g2({3, 1, 20}, {1.6, 1.5, 3.9}, 0.0);
  const DetectionSet gts{det(0, g1, 1.0), det(0, g2, 1.0)};
  const DetectionSet dets{det(0, g1, 0.9), det(0, g1.with_center({0, 1, 30}), 0.8), det(0, g2, 0.7)};

  // Precision/recall after each ranked detection, stepped by hand.
  const double p[3] = {1.0, 0.5, 2.0 / 3.0}, r[3] = {0.5, 0.5, 1.0};
  auto oracle = [&](int n, auto threshold) {
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      double best = 0;
      for (int k = 0; k < 3; ++k)
        if (r[k] >= threshold(i)) best = std::max(best, p[k]);
      sum += best;
    }
    return sum / n;
  };
  const double ap11 = oracle(11, [](int i) { return i / 10.0; });
  const double ap40 = oracle(40, [](int i) { return (i + 1) / 40.0; });
  EXPECT_NEAR(ap11, (6.0 + 5.0 * 2.0 / 3.0) / 11.0, 1e-15);

  EvalConfig cfg;
  const ApResult res = average_precision_for(dets, gts, "Car", cfg);
  ASSERT_EQ(res.curve.size(), 3u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(res.curve[k].precision, p[k], 1e-15);
    EXPECT_NEAR(res.curve[k].recall, r[k], 1e-15);
  }
  EXPECT_NEAR(res.ap, ap11, 1e-12);
  cfg.mode = ApMode::Forty;
  EXPECT_NEAR(average_precision_for(dets, gts, "Car", cfg).ap, ap40, 1e-12);
}

TEST(AveragePrecision, ClassThresholds) {
  const EvalConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.threshold_for("Car"), 0.7);
  EXPECT_DOUBLE_EQ(cfg.threshold_for("Pedestrian"), 0.5);
  EXPECT_DOUBLE_EQ(cfg.threshold_for("Cyclist"), 0.5);

  // A shift with BEV IoU between 0.5 and 0.7 counts for pedestrians only.
  const ObjectBox3D g({0, 1, 15}, {1.0, 1.7, 1.0}, 0.0);
  const ObjectBox3D d = g.with_center({0.25, 1, 15});
  const double iou = bev_iou(g, d);
  ASSERT_GT(iou, 0.5);
  ASSERT_LT(iou, 0.7);
  EXPECT_DOUBLE_EQ(average_precision_for({det(0, d, 1, "Car")}, {det(0, g, 1, "Car")}, "Car", cfg).ap, 0.0);
  EXPECT_DOUBLE_EQ(
      average_precision_for({det(0, d, 1, "Pedestrian")}, {det(0, g, 1, "Pedestrian")}, "Pedestrian", cfg).ap, 1.0);
}

TEST(AveragePrecision, MatchesOnlyWithinFrame) {
  const ObjectBox3D g({0, 1, 15}, {1.6, 1.5, 3.9}, 0.0);
  EXPECT_DOUBLE_EQ(average_precision_for({det(1, g, 1.0)}, {det(0, g, 1.0)}, "Car", EvalConfig{}).ap, 0.0);
}

TEST(AveragePrecision, TopScoredCorrectDetectionNeverHurts) {
  test::Rng rng(76);
  const EvalConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    DetectionSet gts, dets;
    const int n = 2 + trial % 6;
    for (int i = 0; i < n; ++i) gts.push_back(det(0, ObjectBox3D({-20.0 + 6.0 * i, 1, 25}, {1.6, 1.5, 3.9}, 0), 1));
    for (int i = 1; i < n; ++i) {
      if (uniform(rng, 0, 1) < 0.6) dets.push_back(det(0, gts[i].box, uniform(rng, 0, 0.9)));
      if (uniform(rng, 0, 1) < 0.4)
        dets.push_back(det(0, ObjectBox3D({uniform(rng, -30, 30), 1, uniform(rng, 40, 60)}, {1.6, 1.5, 3.9}, 0),
                           uniform(rng, 0, 0.9)));
    }
    const double before = average_precision_for(dets, gts, "Car", cfg).ap;
    dets.push_back(det(0, gts[0].box, 0.95));
    ASSERT_GE(average_precision_for(dets, gts, "Car", cfg).ap, before);
  }
}

TEST(AveragePrecision, DifficultyFiltersSmallGroundTruth) {
  const ObjectBox3D g1({-3, 1, 15}, {1.6, 1.5, 3.9}, 0.0), g2({3, 1, 20}, {1.6, 1.5, 3.9}, 0.0);
  Detection small = det(0, g2, 1.0);
  small.height_2d = 30.0;
  const DetectionSet gts{det(0, g1, 1.0), small};
  const DetectionSet dets{det(0, g1, 0.9)};
  const EvalConfig cfg;
  EXPECT_EQ(average_precision_for(dets, gts, "Car", cfg, IouMetric::BirdsEye, Difficulty::Easy).num_gt, 1);
  EXPECT_DOUBLE_EQ(average_precision_for(dets, gts, "Car", cfg, IouMetric::BirdsEye, Difficulty::Easy).ap, 1.0);
  EXPECT_LT(average_precision_for(dets, gts, "Car", cfg, IouMetric::BirdsEye, Difficulty::Moderate).ap, 1.0);
}

TEST(Metrics, TextAndCsvListEveryRow) {
  const ObjectBox3D g({0, 1, 15}, {1.6, 1.5, 3.9}, 0.0);
  const DetectionSet gts{det(0, g, 1.0), det(0, g.with_center({5, 1, 20}), 1.0, "Pedestrian")};
  const auto rows = evaluate_all(gts, gts, EvalConfig{});
  EXPECT_EQ(rows.size(), 16u);
  const std::string csv = metrics_csv(rows);
  EXPECT_EQ(csv.rfind("class,difficulty,metric,value\n", 0), 0u);
  EXPECT_NE(csv.find("Car,moderate,AP_bv,1.000000"), std::string::npos);
  EXPECT_NE(metrics_text(rows, EvalConfig{}).find("AP mode: 11-point"), std::string::npos);
}

}  // namespace
}  // namespace uniloc
