#include <doctest.h>

#include <cmath>
#include <random>

#include "nss/initial.hpp"
#include "nss/kernels.hpp"
#include "nss/model.hpp"
#include "nss/reference.hpp"
#include "support.hpp"

using namespace nss;
using nss::test::kPi;
using nss::test::max_abs;
using nss::test::max_abs_diff;
using nss::test::noise;
using nss::test::sample;

namespace {

VectorField2D single(double x, double y) {
  VectorField2D v(GridSpec(4, 1.0));
  v.x[0] = x;
  v.y[0] = y;
  return v;
}

}  // namespace

TEST_CASE("beta examples") {
  auto b = beta(single(0.0, 0.0));
  CHECK(b.x[0] == 0.0);
  CHECK(b.y[0] == 0.0);
  b = beta(single(1.0, 0.0));
  CHECK(b.x[0] == 0.5);
  CHECK(b.y[0] == 0.0);
  b = beta(single(3.0, 4.0));
  CHECK(b.x[0] == doctest::Approx(3.0 / 26.0).epsilon(1e-15));
  CHECK(b.y[0] == doctest::Approx(4.0 / 26.0).epsilon(1e-15));
}

TEST_CASE("beta is 1-Lipschitz and bounded by 1/2 on 1e5 samples") {
  // 1e5 pairs packed into two vector fields on a 317 x 317 grid.
  const GridSpec g(317, 1.0);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::uniform_real_distribution<double> scale(-3.0, 2.0);
  VectorField2D v(g), w(g);
  for (std::size_t q = 0; q < v.x.size(); ++q) {
    const double s = std::pow(10.0, scale(rng));
    v.x[q] = s * dist(rng);
    v.y[q] = s * dist(rng);
    w.x[q] = v.x[q] + s * dist(rng);
    w.y[q] = v.y[q] + s * dist(rng);
  }
  const auto bv = beta(v), bw = beta(w);
  const auto rv = reference::beta(v);
  std::size_t violations = 0, over_half = 0;
  for (std::size_t q = 0; q < v.x.size(); ++q) {
    const double lhs = std::hypot(bv.x[q] - bw.x[q], bv.y[q] - bw.y[q]);
    const double rhs = std::hypot(v.x[q] - w.x[q], v.y[q] - w.y[q]);
    if (lhs > rhs * (1.0 + 1e-14)) ++violations;
    if (std::hypot(bv.x[q], bv.y[q]) > 0.5) ++over_half;
  }
  CHECK(v.x.size() >= 100000);
  CHECK(violations == 0);
  CHECK(over_half == 0);
  CHECK(max_abs_diff(bv.x, rv.x) < 1e-16);
  CHECK(max_abs_diff(bv.y, rv.y) < 1e-16);
}

TEST_CASE("nonlinear divergence basics") {
  const GridSpec g(32, 12.8);
  const SpectralGrid ops(g);
  CHECK(max_abs(nonlinear_divergence(ops, RealField2D(g, 2.0))) < 1e-15);
  const auto u = noise(g, 17);
  const auto nd = nonlinear_divergence(ops, u);
  CHECK(std::abs(mean(nd)) < 1e-12);
  CHECK(max_abs_diff(nd, reference::nonlinear_divergence(u)) < 1e-11 * max_abs(nd));
}

TEST_CASE("nonlinear divergence of sin(2 pi x): self-convergence on shared points") {
  auto fn = [](double x, double) { return std::sin(2 * kPi * x); };
  auto gap = [&](int n) {
    const GridSpec coarse(n, 1.0), fine(2 * n, 1.0);
    const auto a = nonlinear_divergence(SpectralGrid(coarse), sample(coarse, fn));
    const auto b = nonlinear_divergence(SpectralGrid(fine), sample(fine, fn));
    double diff = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) diff = std::max(diff, std::abs(a(i, j) - b(2 * i, 2 * j)));
    }
    return diff;
  };
  // Frozen from an independent numpy evaluation: 2.4577e-6 (256 vs 512) and
  // 5.378e-10 (512 vs 1024). beta(2 pi cos) has complex poles close to the
  // real axis, so the coefficients only decay like exp(-0.158 |k|).
  const double g256 = gap(256);
  CHECK(g256 == doctest::Approx(2.4577e-6).epsilon(1e-3));
  CHECK(gap(512) < 1e-8);
}

TEST_CASE("extrapolated nonlinear term") {
  const GridSpec g(24, 1.0);
  const SpectralGrid ops(g);
  const auto u = noise(g, 1, 0.1);
  const auto nd = nonlinear_divergence(ops, u);
  CHECK(max_abs_diff(extrapolated_nonlinear(ops, u, u, u), nd) < 1e-13 * (1.0 + max_abs(nd)));
  const RealField2D c(g, 0.3);
  CHECK(max_abs(extrapolated_nonlinear(ops, c, c, c)) < 1e-15);
}

TEST_CASE("extrapolated nonlinear term is third order in dt") {
  const GridSpec g(32, 1.0);
  const SpectralGrid ops(g);
  auto error = [&](double dt) {
    const double t = 0.3;
    const auto ext = extrapolated_nonlinear(ops, exact_profile(t, g), exact_profile(t - dt, g),
                                            exact_profile(t - 2 * dt, g));
    return norm_l2(kernels::difference(ext, nonlinear_divergence(ops, exact_profile(t + dt, g))));
  };
  const double e1 = error(0.02), e2 = error(0.01), e3 = error(0.005);
  CHECK(e1 / e2 == doctest::Approx(8.0).epsilon(0.05));
  CHECK(e2 / e3 == doctest::Approx(8.0).epsilon(0.03));
}

TEST_CASE("discrete energy of zero and of sin(2 pi x)") {
  const GridSpec g(256, 1.0);
  const SpectralGrid ops(g);
  const ModelParams p{0.05, 1.0, 1.0};
  const auto zero = discrete_energy(ops, RealField2D(g), p);
  CHECK(zero.total == 0.0);

  const auto e = discrete_energy(ops, sample(g, [](double x, double) { return std::sin(2 * kPi * x); }), p);
  // 4 pi^4 eps^2, and a 1e6-point midpoint quadrature of -1/2 ln(1 + 4 pi^2 cos^2(2 pi x)).
  CHECK(e.diffusion_part == doctest::Approx(0.974090910340024).epsilon(1e-13));
  CHECK(e.nonlinear_part == doctest::Approx(-1.3032204672729077).epsilon(1e-12));
  CHECK(e.total == doctest::Approx(e.nonlinear_part + e.diffusion_part).epsilon(1e-15));
  const GridSpec small(16, 1.0);
  const auto s16 = sample(small, [](double x, double) { return std::sin(2 * kPi * x); });
  CHECK(discrete_energy(SpectralGrid(small), s16, p).total ==
        doctest::Approx(reference::discrete_energy(s16, p)).epsilon(1e-13));
}

TEST_CASE("energy is invariant under constant shifts") {
  const GridSpec g(32, 12.8);
  const SpectralGrid ops(g);
  const ModelParams p{0.02, 12.8, 0.5};
  const auto u = smooth_random_field(g, 3, 6, 1.0);
  const double e0 = discrete_energy(ops, u, p).total;
  const double e1 = discrete_energy(ops, kernels::affine(u, 1.0, 7.5), p).total;
  CHECK(e1 == doctest::Approx(e0).epsilon(1e-12));
}

TEST_CASE("energy stays above the lower bound for 100 random smooth fields") {
  const GridSpec g(64, 12.8);
  const SpectralGrid ops(g);
  const ModelParams p{0.02, 12.8, 0.5};
  const double gamma = energy_lower_bound(p.epsilon, p.length);
  int below = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double amp = 0.1 * static_cast<double>(seed);
    if (discrete_energy(ops, smooth_random_field(g, seed, 8, amp), p).total < gamma) ++below;
  }
  CHECK(below == 0);
}

TEST_CASE("modified energy") {
  const GridSpec g(32, 1.0);
  const SpectralGrid ops(g);
  const ModelParams p;
  const auto u = smooth_random_field(g, 9, 4, 0.2);
  CHECK(modified_energy(ops, u, u, u, 0.1, p) == doctest::Approx(discrete_energy(ops, u, p).total).epsilon(1e-15));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto a = noise(g, 3 * s, 0.1), b = noise(g, 3 * s + 1, 0.1), c = noise(g, 3 * s + 2, 0.1);
    CHECK(modified_energy(ops, a, b, c, 0.01, p) >= discrete_energy(ops, a, p).total);
  }
  try {
    (void)modified_energy(ops, u, u, u, 0.0, p);
    FAIL("expected invalid-dt");
  } catch (const NssError& e) {
    CHECK(e.code() == "invalid-dt");
  }
}

TEST_CASE("stability threshold and lower bound constants") {
  // (9/32)(49/16)^4 evaluated in 30-digit arithmetic.
  CHECK(min_stable_A(1.0) == doctest::Approx(24.7398419380188).epsilon(1e-14));
  CHECK(min_stable_A(0.02) == doctest::Approx(61849.604845047).epsilon(1e-13));
  CHECK(min_stable_A(0.5) == doctest::Approx(4.0 * min_stable_A(1.0)).epsilon(1e-15));
  CHECK(min_stable_A(0.5) == doctest::Approx(98.959).epsilon(1e-5));
  CHECK_THROWS_AS(min_stable_A(0.0), NssError);

  CHECK(energy_lower_bound(0.02, 12.8) == doctest::Approx(-675.617063136807).epsilon(1e-13));
  CHECK(std::abs(energy_lower_bound(1.0, 2.0 * kPi)) < 1e-13);
}

TEST_CASE("params validation") {
  CHECK_NOTHROW(ModelParams{0.02, 12.8, 0.0}.validate());
  CHECK_THROWS_AS((ModelParams{0.0, 1.0, 1.0}.validate()), NssError);
  CHECK_THROWS_AS((ModelParams{0.1, 1.0, -1.0}.validate()), NssError);
  CHECK_THROWS_AS((ModelParams{0.1, -1.0, 1.0}.validate()), NssError);
}

TEST_CASE("exact profile and forcing residual") {
  // Small N: roundoff in the biharmonic grows like lambda_max^2.
  const GridSpec g(16, 1.0);
  const SpectralGrid ops(g);
  const ModelParams p{0.05, 1.0, 1.0};
  CHECK(max_abs(exact_profile(kPi / 2, g)) < 1e-16);
  CHECK(max_abs(exact_profile_rate(0.0, g)) == 0.0);
  for (double t : {0.0, 0.37, 1.0, 2.5}) {
    const auto u = exact_profile(t, g);
    auto r = exact_profile_rate(t, g);
    kernels::axpy(1.0, nonlinear_divergence(ops, u), r);
    kernels::axpy(p.epsilon * p.epsilon, ops.biharmonic(u), r);
    const auto f = manufactured_forcing(ops, t, p);
    kernels::axpy(-1.0, f, r);
    CHECK(norm_l2(r) < 1e-12 * (1.0 + norm_l2(f)));
  }
}

TEST_CASE("continuum forcing agrees with the discrete one up to aliasing error") {
  const ModelParams p{0.05, 1.0, 1.0};
  double prev = 1e300;
  for (int n : {64, 96, 128}) {
    const GridSpec g(n, 1.0);
    const SpectralGrid ops(g);
    const ManufacturedForcing discrete(ops, p, ForcingMode::discrete);
    const ManufacturedForcing analytic(ops, p, ForcingMode::analytic);
    const double d = norm_l2(kernels::difference(discrete(ops, 0.4), analytic(ops, 0.4)));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 2e-3);
}
