#include "nss/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nss/spectral.hpp"

namespace nss {

RealField2D random_field(const GridSpec& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  RealField2D f(grid);
  for (double& v : f.values()) v = dist(rng);
  const double avg = mean(f);
  for (double& v : f.values()) v -= avg;
  return f;
}

RealField2D smooth_random_field(const GridSpec& grid, std::uint64_t seed, int max_mode,
                                double amplitude, double offset) {
  if (max_mode < 0 || 2 * max_mode >= grid.n) {
    throw NssError("invalid-profile", "smooth field modes must stay below N/2");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> coeff(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  RealField2D f(grid);
  const double h = grid.spacing();
  const double base = 2.0 * std::numbers::pi / grid.length;
  for (int k = -max_mode; k <= max_mode; ++k) {
    for (int l = 0; l <= max_mode; ++l) {
      if (l == 0 && k <= 0) continue;  // one of each +/- pair, no constant
      const double c = coeff(rng) / (1.0 + k * k + l * l);
      const double phi = phase(rng);
      for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
          f(i, j) += c * std::cos(base * (k * i * h + l * j * h) + phi);
        }
      }
    }
  }
  const double peak = norm_inf(f);
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;
  for (double& v : f.values()) v = v * scale + offset;
  return f;
}

}  // namespace nss
