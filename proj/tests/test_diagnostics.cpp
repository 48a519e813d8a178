#include <doctest.h>

#include <cmath>

#include "nss/diagnostics.hpp"
#include "nss/initial.hpp"
#include "nss/kernels.hpp"
#include "support.hpp"

using namespace nss;
using nss::test::kPi;
using nss::test::sample;

namespace {

Series make_series(double t0, double t1, int points, double (*fn)(double)) {
  Series s;
  for (int i = 0; i < points; ++i) {
    const double t = t0 * std::pow(t1 / t0, static_cast<double>(i) / (points - 1));
    s.emplace_back(t, fn(t));
  }
  return s;
}

}  // namespace

TEST_CASE("roughness, slope and length of sin(2 pi x)") {
  const GridSpec g(32, 1.0);
  const SpectralGrid ops(g);
  const auto u = sample(g, [](double x, double) { return std::sin(2 * kPi * x); });
  CHECK(roughness(RealField2D(g, 3.0)) == 0.0);
  CHECK(average_slope(ops, RealField2D(g, 3.0)) == 0.0);
  CHECK(roughness(u) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(average_slope(ops, u) == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-14));

  const auto row = make_row(ops, ModelParams{}, u, u, u, 7, 1.5, 0.01, false);
  REQUIRE(row.length);
  CHECK(*row.length == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-14));
  CHECK_FALSE(row.modified_energy);
  CHECK(row.step == 7);

  const auto flat = make_row(ops, ModelParams{}, RealField2D(g), RealField2D(g), RealField2D(g), 0, 0, 0.01, true);
  CHECK_FALSE(flat.length);
  REQUIRE(flat.modified_energy);
  CHECK(*flat.modified_energy == 0.0);
}

TEST_CASE("roughness and slope invariances") {
  const GridSpec g(32, 12.8);
  const SpectralGrid ops(g);
  const auto u = smooth_random_field(g, 4, 5, 1.0);
  const auto shifted = kernels::affine(u, 1.0, 2.5);
  CHECK(roughness(shifted) == doctest::Approx(roughness(u)).epsilon(1e-13));
  CHECK(average_slope(ops, shifted) == doctest::Approx(average_slope(ops, u)).epsilon(1e-13));
  RealField2D rolled(g);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) rolled((i + 5) % g.n, (j + 11) % g.n) = u(i, j);
  }
  CHECK(roughness(rolled) == doctest::Approx(roughness(u)).epsilon(1e-13));
  CHECK(average_slope(ops, rolled) == doctest::Approx(average_slope(ops, u)).epsilon(1e-12));
}

TEST_CASE("CSV row format") {
  DiagnosticsRow row;
  row.step = 3;
  row.t = 0.012;
  row.energy = -1.5;
  row.roughness = 0.25;
  row.slope = 0.5;
  row.mass = 0.0;
  row.dt = 0.004;
  CHECK(format_row(row) == "3,0.012,-1.5,,0.25,0.5,,0,0.004");
  row.modified_energy = -1.25;
  row.length = 0.5;
  CHECK(format_row(row) == "3,0.012,-1.5,-1.25,0.25,0.5,0.5,0,0.004");
  CHECK(std::string(kDiagnosticsHeader) == "step,t,energy,modified_energy,roughness,slope,length,mass,dt");
}

TEST_CASE("fits are exact on their own model class") {
  const auto log_series = make_series(1.0, 1000.0, 50, [](double t) { return -3.0 * std::log(t) + 1.0; });
  const auto lf = fit_log_law(log_series, {1.0, 1000.0});
  CHECK(lf.a == doctest::Approx(-3.0).epsilon(1e-13));
  CHECK(lf.b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lf.residual_rms < 1e-12);
  CHECK(lf.points == 50);

  const auto pow_series = make_series(1.0, 1000.0, 40, [](double t) { return 2.0 * std::sqrt(t); });
  const auto pf = fit_power_law(pow_series, {10.0, 400.0});
  CHECK(pf.a == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pf.b == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(pf.residual_rms < 1e-12);
  CHECK(pf.t_min == 10.0);
  CHECK(pf.t_max == 400.0);

  // Rescaling y only rescales the prefactor.
  Series scaled = pow_series;
  for (auto& p : scaled) p.second *= 7.0;
  const auto sf = fit_power_law(scaled, {10.0, 400.0});
  CHECK(sf.b == doctest::Approx(pf.b).epsilon(1e-13));
  CHECK(sf.a == doctest::Approx(7.0 * pf.a).epsilon(1e-12));
}

TEST_CASE("third-order synthetic error data") {
  Series e;
  for (int nt = 100; nt <= 1000; nt += 100) e.emplace_back(nt, 5.0 * std::pow(nt, -3.0));
  CHECK(e[1].second / e[3].second == doctest::Approx(8.0));
  const auto fit = fit_power_law(e, {100, 1000});
  CHECK(fit.b == doctest::Approx(-3.0).epsilon(1e-13));
  const Series two{{200, 5.0 * std::pow(200, -3.0)}, {400, 5.0 * std::pow(400, -3.0)}, {400, 5.0 * std::pow(400, -3.0)}};
  CHECK(fit_power_law(two, {100, 1000}).b == doctest::Approx(-3.0).epsilon(1e-13));
}

TEST_CASE("fit errors") {
  const Series few{{1.0, 1.0}, {2.0, 2.0}};
  try {
    (void)fit_log_law(few, {0.5, 10.0});
    FAIL("expected insufficient-points");
  } catch (const NssError& e) {
    CHECK(e.code() == "insufficient-points");
  }
  const Series negative{{1.0, 1.0}, {2.0, -2.0}, {3.0, 2.0}};
  try {
    (void)fit_power_law(negative, {0.5, 10.0});
    FAIL("expected invalid-fit");
  } catch (const NssError& e) {
    CHECK(e.code() == "invalid-fit");
  }
}

TEST_CASE("saturation detection") {
  const auto linear = make_series(1.0, 1e4, 200, [](double t) { return -40.0 * std::log(t) - 150.0; });
  CHECK_FALSE(detect_saturation(linear));

  Series plateau;
  for (int i = 0; i < 200; ++i) {
    const double t = std::pow(10.0, 4.0 * i / 199.0);
    plateau.emplace_back(t, t < 100.0 ? -40.0 * std::log(t) : -40.0 * std::log(100.0));
  }
  const auto sat = detect_saturation(plateau);
  REQUIRE(sat);
  double t_star = 0.0;
  for (const auto& p : plateau) {
    if (p.first >= 100.0) {
      t_star = p.first;
      break;
    }
  }
  // The last point still above the plateau lies within the band.
  CHECK(*sat <= t_star);
  CHECK(*sat > 90.0);

  Series exact;
  for (int i = 1; i <= 100; ++i) exact.emplace_back(i, i < 40 ? 100.0 - i : 60.0);
  CHECK(detect_saturation(exact) == doctest::Approx(40.0));
}

TEST_CASE("log-law crossing of the energy lower bound") {
  const FitResult fit{FitModel::log_law, -40.8189, -149.8528, 10, 400, 10, 0.0};
  const auto t = log_law_crossing(fit, -675.6);
  REQUIRE(t);
  // exp((-675.6 + 149.8528) / -40.8189)
  CHECK(*t == doctest::Approx(392383.2486779595).epsilon(1e-10));
  CHECK(*t == doctest::Approx(3.9e5).epsilon(0.01));
  const FitResult rising{FitModel::log_law, 1.0, 0.0, 10, 400, 10, 0.0};
  CHECK_FALSE(log_law_crossing(rising, -675.6));
  const auto report = saturation_report({{1, 0}, {2, -1}}, -675.6, fit);
  CHECK(report.gamma == -675.6);
  CHECK(report.predicted_crossing);
  CHECK_FALSE(report.saturation_time);
}
