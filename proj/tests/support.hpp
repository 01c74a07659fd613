#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "uniloc/geometry.hpp"

namespace uniloc::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Vec3 uniform_vec(Rng& rng, double lo, double hi) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

inline CameraIntrinsics kitti_like() { return {700.0, 700.0, 600.0, 180.0}; }

// A box in front of the camera with plausible road-object extents.
inline ObjectBox3D random_box(Rng& rng) {
  const Vec3 center(uniform(rng, -10.0, 10.0), uniform(rng, -1.0, 2.0), uniform(rng, 5.0, 60.0));
  const Vec3 dims(uniform(rng, 0.4, 2.5), uniform(rng, 0.8, 2.2), uniform(rng, 0.5, 5.0));
  return {center, dims, uniform(rng, -kPi, kPi)};
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("uniloc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace uniloc::test
