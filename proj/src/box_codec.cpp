#include "uniloc/box_codec.hpp"

#include <cmath>
#include <string>

#include "uniloc/errors.hpp"

namespace uniloc {

namespace {

const char* kAxisNames[3] = {"width", "height", "length"};

}  // namespace

DimensionPrior::DimensionPrior(const Vec3& m, const Vec3& s) : mean(m), sigma(s) {
  if (!mean.allFinite() || !sigma.allFinite()) throw DomainError("dimension prior must be finite");
  if ((sigma.array() <= 0.0).any()) throw DomainError("dimension prior deviation must be positive");
}

BinLayout::BinLayout(std::vector<double> c, double hw) : centers(std::move(c)), half_width(hw) {
  if (centers.size() < 2) throw DomainError("MultiBin layout needs at least two bins");
  if (!(half_width > 0.0) || !(half_width <= kPi)) throw DomainError("bin half-width must be in (0, pi]");
  for (double& a : centers) a = normalize_angle(a);
  // Coverage: probe the circle densely; every angle must fall into some bin.
  constexpr int kProbes = 3600;
  for (int i = 0; i < kProbes; ++i) {
    const double a = normalize_angle(-kPi + 2.0 * kPi * (i + 0.5) / kProbes);
    bool covered = false;
    for (int b = 0; b < size() && !covered; ++b) covered = contains(b, a);
    if (!covered) throw DomainError("MultiBin layout leaves part of the circle uncovered");
  }
}

BinLayout BinLayout::uniform(int k, double overlap) {
  if (k < 2) throw DomainError("MultiBin layout needs at least two bins");
  std::vector<double> c;
  for (int i = 0; i < k; ++i) c.push_back(-kPi + kPi / k + 2.0 * kPi * i / k);
  return BinLayout(std::move(c), std::min(kPi, overlap * kPi / k));
}

bool BinLayout::contains(int bin, double alpha) const {
  return std::abs(angle_diff(alpha, centers.at(bin))) <= half_width;
}

BinLayout default_bin_layout() { return BinLayout::uniform(4, 1.1); }

Vec2 encode_center(const ObjectBox3D& box, const Roi2D& roi, const CameraIntrinsics& k) {
  const Vec2 uo = project(box.center(), k);
  return {(uo.x() - roi.u) / roi.width, (uo.y() - roi.v) / roi.height};
}

Vec3 decode_center(const Vec2& residual, const Roi2D& roi, double z, const CameraIntrinsics& k) {
  if (!(z > 0.0)) throw DomainError("decode_center: depth must be positive");
  const Vec2 uo(roi.u + residual.x() * roi.width, roi.v + residual.y() * roi.height);
  return backproject(uo, z, k);
}

double encode_depth(double z, double height, const Roi2D& roi, const CameraIntrinsics& k) {
  if (!(z > 0.0)) throw DomainError("encode_depth: depth must be positive");
  if (!(height > 0.0)) throw DomainError("encode_depth: object height must be positive");
  const double z_roi = k.fy * height / roi.height;
  return std::log(z / z_roi);
}

double decode_depth(double dz, double height, const Roi2D& roi, const CameraIntrinsics& k) {
  if (!std::isfinite(dz)) throw DomainError("decode_depth: residual must be finite");
  if (!(height > 0.0)) throw DomainError("decode_depth: object height must be positive");
  return std::exp(dz) * k.fy * height / roi.height;
}

Vec3 encode_dims(const Vec3& dims, const DimensionPrior& prior) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    const double excess = dims[i] - prior.mean[i];
    if (!(excess > 0.0))
      throw DomainError(std::string("encode_dims: ") + kAxisNames[i] +
                        " must exceed its prior for log((d - p_d) / sigma_d)");
    out[i] = std::log(excess / prior.sigma[i]);
  }
  return out;
}

Vec3 decode_dims(const Vec3& ddims, const DimensionPrior& prior) {
  if (!ddims.allFinite()) throw DomainError("decode_dims: residual must be finite");
  return prior.mean + prior.sigma.cwiseProduct(ddims.array().exp().matrix());
}

AngleEncoding encode_alpha(double alpha, const BinLayout& layout) {
  const double a = normalize_angle(alpha);
  AngleEncoding enc;
  for (int b = 0; b < layout.size(); ++b) {
    enc.conf.push_back(layout.contains(b, a) ? 1.0 : 0.0);
    const double d = angle_diff(a, layout.centers[b]);
    enc.offsets.emplace_back(std::cos(d), std::sin(d));
  }
  return enc;
}

double decode_alpha(std::span<const double> conf, std::span<const Vec2> offsets,
                    const BinLayout& layout) {
  const auto k = static_cast<std::size_t>(layout.size());
  if (conf.size() != k || offsets.size() != k)
    throw DomainError("decode_alpha: expected " + std::to_string(k) + " bins");
  std::size_t best = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (conf[i] > conf[best]) best = i;  // strict: lowest index wins ties
  const Vec2& off = offsets[best];
  if (!off.allFinite()) throw DomainError("decode_alpha: offsets must be finite");
  if (off.x() == 0.0 && off.y() == 0.0)
    throw DegenerateError("decode_alpha: zero (cos, sin) offset in bin " + std::to_string(best));
  return normalize_angle(layout.centers[best] + std::atan2(off.y(), off.x()));
}

double decode_alpha(const BoxResiduals& res, const BinLayout& layout) {
  return decode_alpha(res.bin_conf, res.bin_offsets, layout);
}

double alpha_to_theta(double alpha, const Vec3& center) {
  if (!(center.z() > 0.0)) throw DomainError("alpha_to_theta: center must be in front of the camera");
  return normalize_angle(alpha + std::atan2(center.x(), center.z()));
}

double theta_to_alpha(double theta, const Vec3& center) {
  if (!(center.z() > 0.0)) throw DomainError("theta_to_alpha: center must be in front of the camera");
  return normalize_angle(theta - std::atan2(center.x(), center.z()));
}

BoxResiduals encode_box(const ObjectBox3D& box, const Roi2D& roi, const CameraIntrinsics& k,
                        const DimensionPrior& prior, const BinLayout& layout) {
  BoxResiduals res;
  const Vec2 c = encode_center(box, roi, k);
  res.du = c.x();
  res.dv = c.y();
  res.dz = encode_depth(box.center().z(), box.height(), roi, k);
  res.ddims = encode_dims(box.dims(), prior);
  AngleEncoding enc = encode_alpha(theta_to_alpha(box.yaw(), box.center()), layout);
  res.bin_conf = std::move(enc.conf);
  res.bin_offsets = std::move(enc.offsets);
  return res;
}

ObjectBox3D decode_box(const BoxResiduals& res, const Roi2D& roi, const CameraIntrinsics& k,
                       const DimensionPrior& prior, const BinLayout& layout) {
  const Vec3 dims = decode_dims(res.ddims, prior);
  const double z = decode_depth(res.dz, dims.y(), roi, k);
  const Vec3 center = decode_center({res.du, res.dv}, roi, z, k);
  const double alpha = decode_alpha(res, layout);
  return {center, dims, alpha_to_theta(alpha, center)};
}

}  // namespace uniloc
