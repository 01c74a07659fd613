#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"
#include "uniloc/box_codec.hpp"
#include "uniloc/errors.hpp"

namespace uniloc {
namespace {

using test::kitti_like;
using test::uniform;

DimensionPrior car_prior() { return {{1.4, 1.3, 3.4}, {0.1, 0.1, 0.2}}; }

TEST(EncodeCenter, ZeroWhenProjectionHitsRoiCenter) {
  const ObjectBox3D box({1.0, 0.5, 12.0}, {1.6, 1.5, 3.9}, 0.3);
  const Vec2 uo = project(box.center(), kitti_like());
  const Vec2 r = encode_center(box, Roi2D(uo.x(), uo.y(), 80, 60), kitti_like());
  EXPECT_LT(r.norm(), 1e-15);
}

TEST(EncodeCenter, NormalizesByRoiSize) {
  // Projection u = 670 for (1, 0, 10); the RoI sits at u = 650 with width 100.
  const ObjectBox3D box({1.0, 0.0, 10.0}, {1, 1, 1}, 0.0);
  const Vec2 r = encode_center(box, Roi2D(650, 180, 100, 50), kitti_like());
  EXPECT_NEAR(r.x(), 0.2, 1e-12);
  EXPECT_NEAR(r.y(), 0.0, 1e-12);
}

TEST(DecodeCenter, PrincipalPointRoi) {
  const Vec3 c = decode_center({0, 0}, Roi2D(600, 180, 50, 50), 10.0, kitti_like());
  EXPECT_LT((c - Vec3(0, 0, 10)).norm(), 1e-12);
}

TEST(DecodeCenter, ResidualShiftsProjection) {
  const Vec3 c = decode_center({0.2, 0.0}, Roi2D(650, 180, 100, 50), 10.0, kitti_like());
  EXPECT_NEAR(project(c, kitti_like()).x(), 670.0, 1e-9);
  EXPECT_THROW(decode_center({0, 0}, Roi2D(650, 180, 100, 50), 0.0, kitti_like()), DomainError);
}

TEST(CenterCodec, RoundTripAtSameDepth) {
  test::Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const ObjectBox3D box = test::random_box(rng);
    const Roi2D roi(uniform(rng, 0, 1242), uniform(rng, 0, 375), uniform(rng, 5, 300), uniform(rng, 5, 200));
    const Vec3 c = decode_center(encode_center(box, roi, kitti_like()), roi, box.center().z(), kitti_like());
    ASSERT_LT((project(c, kitti_like()) - project(box.center(), kitti_like())).norm(), 1e-9);
    ASSERT_LT((c - box.center()).norm(), 1e-9);
  }
}

TEST(DepthCodec, CoarseDepthFromHeight) {
  // z_roi = 700 * 1.5 / 105 = 10.
  const Roi2D roi(600, 180, 50, 105);
  EXPECT_NEAR(encode_depth(10.0, 1.5, roi, kitti_like()), 0.0, 1e-15);
  EXPECT_NEAR(encode_depth(10.0 * std::exp(1.0), 1.5, roi, kitti_like()), 1.0, 1e-12);
  EXPECT_NEAR(decode_depth(0.0, 1.5, roi, kitti_like()), 10.0, 1e-12);
  EXPECT_NEAR(decode_depth(std::log(2.0), 1.5, roi, kitti_like()), 20.0, 1e-12);
}

TEST(DepthCodec, RoundTrip) {
  test::Rng rng(22);
  for (int i = 0; i < 1000; ++i) {
    const double z = uniform(rng, 1, 80), h = uniform(rng, 0.5, 3.0);
    const Roi2D roi(600, 180, 40, uniform(rng, 5, 300));
    const double dz = encode_depth(z, h, roi, kitti_like());
    ASSERT_NEAR(decode_depth(dz, h, roi, kitti_like()), z, 1e-12 * z);
    ASSERT_NEAR(encode_depth(decode_depth(dz, h, roi, kitti_like()), h, roi, kitti_like()), dz, 1e-12);
  }
  EXPECT_THROW(encode_depth(-1.0, 1.5, Roi2D(0, 0, 1, 1), kitti_like()), DomainError);
}

TEST(DimsCodec, LogOfNormalizedExcess) {
  const DimensionPrior prior({1.6, 1.6, 1.6}, {0.1, 0.1, 0.1});
  EXPECT_LT(encode_dims({1.7, 1.7, 1.7}, prior).norm(), 1e-12);
  EXPECT_LT((decode_dims(Vec3::Zero(), prior) - Vec3::Constant(1.7)).norm(), 1e-15);
  EXPECT_THROW(encode_dims({1.5, 1.7, 1.7}, prior), DomainError);
  EXPECT_THROW(encode_dims({1.7, 1.7, 1.6}, prior), DomainError);
}

TEST(DimsCodec, RoundTrip) {
  test::Rng rng(23);
  const DimensionPrior prior = car_prior();
  for (int i = 0; i < 1000; ++i) {
    const Vec3 d = prior.mean + test::uniform_vec(rng, 1e-3, 2.0);
    const Vec3 back = decode_dims(encode_dims(d, prior), prior);
    ASSERT_LT((back - d).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BinLayout, DefaultHasFourOverlappingBins) {
  const BinLayout l = default_bin_layout();
  ASSERT_EQ(l.size(), 4);
  EXPECT_NEAR(l.centers[0], -3 * kPi / 4, 1e-15);
  EXPECT_NEAR(l.centers[3], 3 * kPi / 4, 1e-15);
  EXPECT_NEAR(l.half_width, 1.1 * kPi / 4, 1e-15);
  // Bin boundaries overlap: the midpoint between two centers belongs to both.
  EXPECT_TRUE(l.contains(1, 0.0));
  EXPECT_TRUE(l.contains(2, 0.0));
}

TEST(BinLayout, RejectsUncoveredCircle) {
  EXPECT_THROW(BinLayout({0.0, kPi}, 0.5), DomainError);
  EXPECT_THROW(BinLayout({0.0}, kPi), DomainError);
}

TEST(DecodeAlpha, TwoBinExamples) {
  const BinLayout l({0.0, kPi}, kPi / 2 * 1.1);
  const std::vector<double> conf0{0.9, 0.1}, conf1{0.2, 0.8};
  const std::vector<Vec2> off{{1.0, 0.0}, {0.0, 1.0}};
  EXPECT_NEAR(decode_alpha(conf0, off, l), 0.0, 1e-15);
  EXPECT_NEAR(decode_alpha(conf1, off, l), -kPi / 2, 1e-12);
}

TEST(DecodeAlpha, ZeroOffsetIsDegenerate) {
  const BinLayout l = default_bin_layout();
  const std::vector<double> conf{1, 0, 0, 0};
  const std::vector<Vec2> off(4, Vec2::Zero());
  EXPECT_THROW(decode_alpha(conf, off, l), DegenerateError);
}

TEST(AlphaCodec, RoundTripThroughContainingBin) {
  test::Rng rng(24);
  const BinLayout l = default_bin_layout();
  for (int i = 0; i < 10000; ++i) {
    const double a = uniform(rng, -kPi, kPi);
    const AngleEncoding enc = encode_alpha(a, l);
    for (double c : enc.conf) ASSERT_TRUE(c >= 0.0 && c <= 1.0);
    ASSERT_LT(std::abs(angle_diff(decode_alpha(enc.conf, enc.offsets, l), a)), 1e-12);
  }
}

TEST(AlphaCodec, ArgmaxInvariantUnderMonotoneRescaling) {
  test::Rng rng(25);
  const BinLayout l = default_bin_layout();
  for (int i = 0; i < 500; ++i) {
    std::vector<double> conf(4);
    std::vector<Vec2> off(4);
    for (int b = 0; b < 4; ++b) {
      conf[b] = uniform(rng, 0, 1);
      const double t = uniform(rng, -1, 1);
      off[b] = Vec2(std::cos(t), std::sin(t));
    }
    std::vector<double> warped(4);
    for (int b = 0; b < 4; ++b) warped[b] = 1.0 / (1.0 + std::exp(-7.0 * conf[b] + 2.0));
    ASSERT_DOUBLE_EQ(decode_alpha(conf, off, l), decode_alpha(warped, off, l));
  }
}

TEST(AlphaTheta, RayAngle) {
  EXPECT_NEAR(alpha_to_theta(0.3, {0, 1, 10}), 0.3, 1e-15);
  EXPECT_NEAR(alpha_to_theta(0.3, {10, 1, 10}), 0.3 + kPi / 4, 1e-15);
  EXPECT_THROW(alpha_to_theta(0.0, {0, 0, -1}), DomainError);
}

TEST(AlphaTheta, RoundTripAndScaleInvariance) {
  test::Rng rng(26);
  for (int i = 0; i < 1000; ++i) {
    const double a = uniform(rng, -kPi, kPi);
    const Vec3 c(uniform(rng, -30, 30), uniform(rng, -3, 3), uniform(rng, 0.5, 80));
    const double t = alpha_to_theta(a, c);
    ASSERT_LT(std::abs(angle_diff(theta_to_alpha(t, c), a)), 1e-12);
    ASSERT_LT(std::abs(angle_diff(alpha_to_theta(a, uniform(rng, 0.1, 10) * c), t)), 1e-12);
  }
}

TEST(BoxCodec, FullRoundTrip) {
  test::Rng rng(27);
  const DimensionPrior prior = car_prior();
  const BinLayout l = default_bin_layout();
  for (int i = 0; i < 1000; ++i) {
    const Vec3 c(uniform(rng, -15, 15), uniform(rng, 0, 2), uniform(rng, 5, 70));
    const ObjectBox3D box(c, prior.mean + test::uniform_vec(rng, 0.01, 1.0), uniform(rng, -kPi, kPi));
    const Roi2D roi(uniform(rng, 0, 1242), uniform(rng, 0, 375), uniform(rng, 10, 400), uniform(rng, 10, 200));
    const BoxResiduals res = encode_box(box, roi, kitti_like(), prior, l);
    ASSERT_EQ(res.bin_conf.size(), 4u);
    const ObjectBox3D back = decode_box(res, roi, kitti_like(), prior, l);
    ASSERT_LT((back.center() - box.center()).norm(), 1e-9);
    ASSERT_LT((back.dims() - box.dims()).norm(), 1e-9);
    ASSERT_LT(std::abs(angle_diff(back.yaw(), box.yaw())), 1e-9);
  }
}

}  // namespace
}  // namespace uniloc
