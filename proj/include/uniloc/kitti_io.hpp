#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "uniloc/geometry.hpp"
#include "uniloc/image.hpp"

namespace uniloc {

// One line of a KITTI object label file. dims are (h, w, l) and location is
// the bottom-center of the box, both in KITTI order.
struct KittiLabel {
  std::string type;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox{};  // left, top, right, bottom
  std::array<double, 3> dims_hwl{};
  std::array<double, 3> location{};
  double rotation_y = 0.0;
  std::optional<double> score;
};

std::vector<KittiLabel> parse_labels(std::string_view text);
std::string format_label(const KittiLabel& lbl);
std::string write_labels(std::span<const KittiLabel> labels);

// KITTI's object frame has the length along x at rotation_y = 0; here the
// length runs along z, so yaw = rotation_y + pi/2.
ObjectBox3D label_to_box(const KittiLabel& lbl);
KittiLabel box_to_label(const ObjectBox3D& box, std::string type, const Roi2D& bbox,
                        std::optional<double> score = std::nullopt);

// Velodyne-style binary: float32 x, y, z, intensity per point, little-endian.
struct PointXYZI {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float intensity = 0.0f;
};

std::vector<PointXYZI> read_pointcloud(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pointcloud(std::span<const PointXYZI> points);

struct KittiCalib {
  StereoRig rig;
  // Camera-from-velodyne transform; identity when the file has none.
  Eigen::Matrix<double, 3, 4> velo_to_cam = Eigen::Matrix<double, 3, 4>::Identity();
};

StereoRig parse_calib(std::string_view text);
KittiCalib parse_calib_file(std::string_view text);
std::string write_calib(const StereoRig& rig);

// Binary PGM (P5). Writes 16-bit big-endian samples with maxval 65535; reads
// 8- or 16-bit. Values are mapped to [0,1].
std::vector<std::uint8_t> write_pgm(const IntensityImage& img);
IntensityImage read_pgm(std::span<const std::uint8_t> bytes);

// The value a [0,1] intensity takes after a 16-bit PGM round trip.
double quantize_u16(double v);

// Locale-independent number formatting/parsing shared by the text formats.
std::string format_fixed(double v, int decimals = 6);
std::string format_exact(double v);
double parse_double(std::string_view token, std::size_t line = 0);
long long parse_int(std::string_view token, std::size_t line = 0);
std::vector<std::string_view> split_ws(std::string_view line);

std::string read_file(const std::string& path);
std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);
void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace uniloc
