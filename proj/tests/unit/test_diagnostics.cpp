#include <cmath>
#include <numbers>

#include "aggdiff/diagnostics.hpp"
#include "aggdiff/oracles.hpp"
#include "aggdiff/quadrature.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aggdiff;

constexpr double kPi = std::numbers::pi;

namespace {

std::vector<double> log_spaced(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a * std::pow(b / a, double(i) / (n - 1));
  return t;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("lebesgue norms of a gaussian") {
    const GridPtr g = make_grid(1, 256, 20.0);
    const Field u = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    CHECK(lp_norm(u, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_norm(u, 2.0) == doctest::Approx(std::pow(4.0 * kPi, -0.25)).epsilon(1e-12));
    CHECK(lp_norm(u, INFINITY) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-14));
    CHECK(hm_seminorm(u, 0.0) == doctest::Approx(lp_norm(u, 2.0)).epsilon(1e-12));
    // ||G'||_2^2 = int x^2 e^{-x^2} / (2 pi)
    CHECK(hm_seminorm(u, 1.0) ==
          doctest::Approx(std::sqrt(std::sqrt(kPi) / 2.0 / (2.0 * kPi))).epsilon(1e-10));
    CHECK_THROWS(lp_norm(u, 0.5));
  }

  TEST_CASE("moments") {
    const GridPtr g = make_grid(2, 128, 16.0);
    const Field u = sample_gaussian(make_gaussian(2, 1.0, 1.5), g);
    const auto m2 = second_moment(u);
    CHECK(m2.value == doctest::Approx(3.0).epsilon(1e-10));
    CHECK_FALSE(m2.tainted);

    const GridPtr g1 = make_grid(1, 256, 20.0);
    const Field v = sample_gaussian(make_gaussian(1, 1.0, 1.0), g1);
    CHECK(weighted_l2(v).value == doctest::Approx(std::sqrt(1.0 / (4.0 * std::sqrt(kPi)))).epsilon(1e-10));

    Field wide(g1);
    for (auto& x : wide.values) x = 1.0;
    CHECK(second_moment(wide).tainted);
  }

  TEST_CASE("distance to the heat kernel") {
    const GridPtr g = make_grid(1, 512, 40.0);
    const Field u = heat_kernel_field(g, 2.0, 1.7);
    CHECK(l1_heat_distance(u, 2.0, 1.7) < 1e-10);
    const Field shifted = sample_gaussian(make_gaussian(1, 1.7, 4.0, {1.0}), g);
    CHECK(l1_heat_distance(shifted, 2.0, 1.7) > 0.1);
    CHECK_THROWS(l1_heat_distance(u, 0.0, 1.0));
  }

  TEST_CASE("low frequency fraction") {
    const GridPtr g = make_grid(1, 128, 10.0);
    const Field u = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    CHECK(low_freq_fraction(u, 0.0, 1e6).fraction == doctest::Approx(1.0).epsilon(1e-12));
    const auto tiny = low_freq_fraction(u, 1e6, 1.0);
    CHECK(tiny.only_dc);
    const double mid = low_freq_fraction(u, 1.0, 1.0).fraction;
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
  }

  TEST_CASE("diagnostics row layout") {
    const GridPtr g = make_grid(1, 128, 20.0);
    const Field u = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    const auto row0 = diagnostics_row(u, 0.0, {});
    REQUIRE(row0.size() == base_columns().size());
    CHECK(std::isnan(row0[9]));
    const auto row = diagnostics_row(u, 1.0, {});
    CHECK(row[0] == 1.0);
    CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isfinite(row[9]));
    CHECK(base_columns().front() == "t");
    CHECK(entropy_columns().front() == "s");
  }

  TEST_CASE("time series") {
    TimeSeries ts({"t", "y"});
    ts.add_row({0.0, 1.0});
    ts.add_row({1.0, 2.0});
    CHECK(ts.rows() == 2);
    CHECK(ts.column("y")[1] == 2.0);
    CHECK(ts.index_of("y") == 1);
    CHECK(ts.row(1) == std::vector<double>{1.0, 2.0});
    CHECK_THROWS(ts.column("z"));
    CHECK_THROWS(ts.add_row({1.0}));
    ts.set_meta("a", "1");
    ts.set_meta("a", "2");
    REQUIRE(ts.metadata().size() == 1);
    CHECK(ts.metadata()[0].second == "2");
  }

  TEST_CASE("decay fits") {
    const auto t = log_spaced(1.0, 100.0, 40);
    std::vector<double> y, z, w;
    for (double x : t) {
      y.push_back(5.0 * std::pow(x, -2.0));
      z.push_back(3.0 * std::exp(-2.0 * x));
      w.push_back(std::pow(x, -0.5) * std::log(x + 1.0));
    }
    const auto p = fit_decay(t, y, 1.0, 100.0, FitModel::Power, "y");
    CHECK(p.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(std::exp(p.intercept) == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(p.residual_rms < 1e-12);
    CHECK(p.samples == 40);

    std::vector<double> s;
    for (int i = 0; i < 30; ++i) s.push_back(0.1 * i);
    std::vector<double> zs;
    for (double x : s) zs.push_back(3.0 * std::exp(-2.0 * x));
    CHECK(fit_decay(s, zs, 0.0, 3.0, FitModel::Exponential).slope ==
          doctest::Approx(-2.0).epsilon(1e-12));

    std::vector<double> tl, yl;
    for (double x : log_spaced(2.0, 1000.0, 50)) {
      tl.push_back(x);
      yl.push_back(std::pow(x, -0.5) * std::log(x));
    }
    CHECK(fit_decay(tl, yl, 2.0, 1000.0, FitModel::PowerLog).slope ==
          doctest::Approx(-0.5).epsilon(1e-12));

    CHECK_THROWS_AS(fit_decay(t, y, 1.0, 1.5, FitModel::Power), std::invalid_argument);
    auto bad = y;
    bad[20] = -1.0;
    CHECK_THROWS_AS(fit_decay(t, bad, 1.0, 100.0, FitModel::Power), std::invalid_argument);
  }

  TEST_CASE("fit verdict and report") {
    const auto t = log_spaced(1.0, 10.0, 20);
    std::vector<double> y;
    for (double x : t) y.push_back(std::pow(x, -0.25));
    auto rep = fit_decay(t, y, 1.0, 10.0, FitModel::Power, "l2");
    rep.has_theory = true;
    rep.theory = -0.25;
    rep.tolerance = 0.05;
    CHECK(rep.verdict());
    rep.theory = -0.5;
    CHECK_FALSE(rep.verdict());
    CHECK(rep.to_key_value().find("quantity=l2") != std::string::npos);
    CHECK(parse_fit_model("power-log") == FitModel::PowerLog);
    CHECK(std::string(fit_model_name(FitModel::Exponential)) == "exp");
    CHECK_THROWS(parse_fit_model("linear"));
  }

  TEST_CASE("table fits pick their time column") {
    TimeSeries ts({"t", "s", "q"});
    for (int i = 0; i < 20; ++i) {
      const double s = 0.1 * i;
      ts.add_row({0.5 * std::expm1(2.0 * s), s, std::exp(-3.0 * s)});
    }
    CHECK(fit_exponential(ts, "q", 0.0, 2.0).slope == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK_THROWS(fit_power_law(ts, "missing", 0.1, 10.0));
  }

  TEST_CASE("product estimate") {
    const GridPtr g = make_grid(1, 128, 12.0);
    const Field f = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    const Field k = sample_gaussian(make_gaussian(1, 1.0, 0.5, {1.0}), g);
    const Field zero(g);
    const auto c0 = dm_product_check(f, k, zero, 1.0);
    CHECK(c0.lhs == 0.0);
    CHECK(c0.ratio == 0.0);
    const auto c1 = dm_product_check(f, k, f, 1.0);
    CHECK(c1.lhs > 0.0);
    CHECK(c1.ratio < 1.0);
  }

  TEST_CASE("gagliardo-nirenberg ratio is scale invariant") {
    // 1/2 = 1 + theta (1/2 - 2) + (1 - theta)/2 at theta = 1/2
    const GridPtr g = make_grid(1, 512, 40.0);
    const Field a = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    const Field b = sample_gaussian(make_gaussian(1, 3.0, 4.0), g);
    const auto ca = gns_check(a, 1.0, 2.0, 2.0, 2.0, 2.0, 0.5);
    const auto cb = gns_check(b, 1.0, 2.0, 2.0, 2.0, 2.0, 0.5);
    CHECK(ca.ratio == doctest::Approx(cb.ratio).epsilon(1e-9));
    CHECK_THROWS_AS(gns_check(a, 1.0, 2.0, 2.0, 2.0, 2.0, 0.4), std::invalid_argument);
  }

  TEST_CASE("truncated beta integral") {
    const auto c = truncated_beta_check(1.0, 2.0);
    CHECK(c.integral > 0.0);
    CHECK(c.integral < 2.0);
    for (double t : {1.0, 10.0, 300.0}) {
      for (double alpha : {1.0, 1.5, 3.0}) {
        // substitute u = sqrt(t - s)
        const double ref =
            integrate([&](double u) { return 2.0 * std::pow(1.0 + t - u * u, -alpha); }, 0.0,
                      std::sqrt(t), 1e-12)
                .value;
        const auto r = truncated_beta_check(t, alpha);
        CHECK(r.integral == doctest::Approx(ref).epsilon(1e-8));
        const double shape = alpha > 1.0 ? 1.0 / std::sqrt(t) : std::log1p(t) / std::sqrt(t);
        CHECK(r.shape == doctest::Approx(shape));
      }
    }
    CHECK_THROWS(truncated_beta_check(0.5, 2.0));
    CHECK_THROWS(truncated_beta_check(2.0, 0.5));
  }
}
