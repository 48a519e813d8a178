#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <unistd.h>

#include "nss/grid.hpp"

namespace nss::test {

inline constexpr double kPi = std::numbers::pi;

inline RealField2D sample(const GridSpec& g, const std::function<double(double, double)>& fn) {
  RealField2D f(g);
  const double h = g.spacing();
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) f(i, j) = fn(i * h, j * h);
  }
  return f;
}

inline RealField2D noise(const GridSpec& g, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  RealField2D f(g);
  for (auto& v : f.values()) v = dist(rng);
  return f;
}

inline double max_abs_diff(const RealField2D& a, const RealField2D& b) {
  double m = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) m = std::max(m, std::abs(a[q] - b[q]));
  return m;
}

inline double max_abs(const RealField2D& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Fresh scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() /
              ("nss_" + tag + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace nss::test
