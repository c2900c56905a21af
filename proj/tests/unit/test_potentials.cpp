#include <cmath>
#include <fstream>
#include <numbers>

#include "aggdiff/potentials.hpp"
#include "aggdiff/quadrature.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aggdiff;

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

namespace {

double central_difference_error(const PotentialSpec& w, const std::vector<double>& x, double h) {
  double err = 0.0;
  const auto grad = eval_gradient(w, x);
  for (std::size_t d = 0; d < x.size(); ++d) {
    auto xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    const double fd = (eval_potential(w, xp) - eval_potential(w, xm)) / (2.0 * h);
    err = std::max(err, std::abs(fd - grad[d]));
  }
  return err;
}

// Plain Fourier transform of a radial profile by direct Hankel quadrature.
double hankel(const std::function<double(double)>& g, double k, int dim) {
  std::function<double(double)> f;
  if (dim == 1) {
    f = [&](double r) { return 2.0 * std::cos(k * r) * g(r); };
  } else if (dim == 2) {
    f = [&](double r) { return 2.0 * kPi * r * std::cyl_bessel_j(0.0, k * r) * g(r); };
  } else {
    f = [&](double r) {
      const double kr = k * r;
      return 4.0 * kPi * r * r * (kr == 0.0 ? 1.0 : std::sin(kr) / kr) * g(r);
    };
  }
  return integrate(f, 0.0, 30.0, 1e-12, 1e-14).value;
}

}  // namespace

TEST_SUITE("potentials") {
  TEST_CASE("point values and derivatives") {
    const auto gauss = PotentialSpec::gaussian(-1.0, 1.0);
    for (int dim : {1, 2, 3}) {
      std::vector<double> origin(dim, 0.0);
      CHECK(eval_potential(gauss, origin) == -1.0);
      for (double g : eval_gradient(gauss, origin)) CHECK(g == 0.0);
      CHECK(eval_laplacian(gauss, origin) == doctest::Approx(2.0 * dim).epsilon(1e-14));
    }

    const auto morse = PotentialSpec::morse(1.0, 2.0);
    const double r = 0.3;
    CHECK(radial_laplacian(morse, r, 2) ==
          doctest::Approx((4.0 - 4.0 * r * r) * std::exp(-r * r)).epsilon(1e-13));
    CHECK(morse.profile(r) == doctest::Approx(1.0 - std::exp(-r * r)).epsilon(1e-14));
    CHECK(morse.far_field() == 1.0);

    const auto zero = PotentialSpec::zero();
    const std::vector<double> x{0.4, -1.2};
    CHECK(eval_potential(zero, x) == 0.0);
    CHECK(eval_laplacian(zero, x) == 0.0);
  }

  TEST_CASE("radial symmetry") {
    const auto w = PotentialSpec::morse(0.7, 1.5);
    const double a = eval_potential(w, std::vector<double>{0.6, 0.8});
    const double b = eval_potential(w, std::vector<double>{-0.8, 0.6});
    const double c = eval_potential(w, std::vector<double>{0.0, -1.0});
    CHECK(a == doctest::Approx(b).epsilon(1e-15));
    CHECK(a == doctest::Approx(c).epsilon(1e-15));
  }

  TEST_CASE("analytic gradient agrees with central differences at second order") {
    const std::vector<double> x{0.37, -0.52};
    for (const auto& w : {PotentialSpec::gaussian(-0.3, 1.2), PotentialSpec::morse(0.5, 1.5),
                          PotentialSpec::morse(1.0, 2.0)}) {
      const double e1 = central_difference_error(w, x, 1e-2);
      const double e2 = central_difference_error(w, x, 5e-3);
      CHECK(std::log2(e1 / e2) >= 1.9);
    }
  }

  TEST_CASE("gaussian norms in closed form") {
    const double eps = 0.3;
    const double q[] = {2.0};
    const auto n = potential_norms(PotentialSpec::gaussian(-eps, 1.0), 1, q);
    CHECK(n.w_l1.value == doctest::Approx(eps * std::sqrt(kPi)).epsilon(1e-9));
    CHECK(n.grad_linf.value == doctest::Approx(eps * std::sqrt(2.0) * std::exp(-0.5)).epsilon(1e-9));
    CHECK(n.w_l2.value == doctest::Approx(eps * std::pow(kPi / 2.0, 0.25)).epsilon(1e-9));
    CHECK(n.grad_l1.value == doctest::Approx(2.0 * eps).epsilon(1e-9));
    CHECK(n.grad_norm(2.0).value == doctest::Approx(eps * std::pow(kPi / 2.0, 0.25)).epsilon(1e-9));
    CHECK(n.grad_norm(1.0).value == doctest::Approx(n.grad_l1.value));
    CHECK(n.radial_bound.value == doctest::Approx(2.0 * eps / kE).epsilon(1e-9));

    const auto unit = potential_norms(PotentialSpec::gaussian(-1.0, 1.0), 1);
    CHECK(unit.w_l1.value == doctest::Approx(1.772454).epsilon(1e-6));
    CHECK(unit.grad_linf.value == doctest::Approx(0.857763).epsilon(1e-6));
    CHECK(unit.w_l2.value == doctest::Approx(1.119515).epsilon(1e-6));
  }

  TEST_CASE("norms scale linearly with the amplitude") {
    const auto a = potential_norms(PotentialSpec::gaussian(-0.1, 1.0), 2);
    const auto b = potential_norms(PotentialSpec::gaussian(-0.4, 1.0), 2);
    CHECK(b.w_l1.value == doctest::Approx(4.0 * a.w_l1.value).epsilon(1e-10));
    CHECK(b.grad_linf.value == doctest::Approx(4.0 * a.grad_linf.value).epsilon(1e-10));
    CHECK(b.lap_plus_lhalfN.value == doctest::Approx(4.0 * a.lap_plus_lhalfN.value).epsilon(1e-9));
  }

  TEST_CASE("zero potential norms vanish") {
    const auto n = potential_norms(PotentialSpec::zero(), 2);
    CHECK(n.w_l1.finite);
    CHECK(n.w_l1.value == 0.0);
    CHECK(n.grad_linf.value == 0.0);
    CHECK(n.lap_plus_lhalfN.value == 0.0);
  }

  TEST_CASE("morse norms") {
    const auto n = potential_norms(PotentialSpec::morse(1.0, 2.0), 2);
    CHECK_FALSE(n.w_l1.finite);
    // int (4 - 4 r^2)_+ e^{-r^2} 2 pi r dr = 4 pi / e
    CHECK(n.lap_plus_integral == doctest::Approx(4.0 * kPi / kE).epsilon(1e-9));
    CHECK(n.lap_plus_lhalfN.value == doctest::Approx(4.0 * kPi / kE).epsilon(1e-9));
    CHECK(n.grad_linf.value == doctest::Approx(std::sqrt(2.0) * std::exp(-0.5)).epsilon(1e-9));
    REQUIRE(n.morse_display_value.has_value());
    // pi int_0^4 (u - 2) e^{-u} du
    CHECK(*n.morse_display_value ==
          doctest::Approx(-kPi * (1.0 + 3.0 * std::exp(-4.0))).epsilon(1e-9));
  }

  TEST_CASE("unit sphere areas") {
    CHECK(unit_sphere_area(1) == 2.0);
    CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * kPi));
    CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * kPi));
  }

  TEST_CASE("sampling on a grid removes the far field") {
    const GridPtr g = make_grid(2, 64, 6.0);
    const auto s = sample_on_grid(PotentialSpec::morse(2.0, 2.0), g);
    CHECK(s.far_field_shift == 2.0);
    for (std::size_t i = 0; i < g->size(); i += 97) {
      const double r2 = g->radius_squared(i);
      CHECK(s.potential[i] == doctest::Approx(-2.0 * std::exp(-r2)).epsilon(1e-14));
      const std::vector<double> x{g->coordinate(i, 0), g->coordinate(i, 1)};
      const auto grad = eval_gradient(s.spec, x);
      CHECK(s.gradient[0][i] == grad[0]);
      CHECK(s.gradient[1][i] == grad[1]);
    }
    CHECK_FALSE(s.is_zero());
    CHECK(sample_on_grid(PotentialSpec::zero(), g).is_zero());
  }

  TEST_CASE("sampled gradient maximum approaches the analytic sup") {
    const GridPtr g = make_grid(1, 8192, 4.0);
    const double eps = 0.5;
    const auto s = sample_on_grid(PotentialSpec::gaussian(-eps, 1.0), g);
    const double sup = eps * std::sqrt(2.0) * std::exp(-0.5);
    CHECK(aggdiff::test::max_abs(s.gradient[0]) == doctest::Approx(sup).epsilon(1e-6));
  }

  TEST_CASE("scaled family") {
    const auto w = PotentialSpec::morse(0.5, 1.5).scaled(3.0);
    CHECK(w.amplitude() == 1.5);
    CHECK(w.exponent() == 1.5);
    const auto t =
        PotentialSpec::tabulated({0.0, 1.0, 2.0, 3.0}, {-1.0, -0.5, -0.1, 0.0}).scaled(2.0);
    CHECK(t.table_values()[0] == -2.0);
  }

  TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS(PotentialSpec::gaussian(1.0, 0.0));
    CHECK_THROWS(PotentialSpec::morse(1.0, 0.5));
    CHECK_THROWS(PotentialSpec::tabulated({0.5, 1.0}, {1.0, 0.0}));
    CHECK_THROWS(PotentialSpec::tabulated({0.0, 1.0}, {1.0}));
  }

  TEST_CASE("tabulated gaussian follows the closed form") {
    std::vector<double> r, v;
    for (int i = 0; i <= 800; ++i) {
      r.push_back(0.01 * i);
      v.push_back(-0.5 * std::exp(-r.back() * r.back()));
    }
    v.back() = 0.0;
    const auto tab = PotentialSpec::tabulated(r, v);
    const auto ref = PotentialSpec::gaussian(-0.5, 1.0);
    for (double x : {0.005, 0.505, 1.234, 2.71})
      CHECK(tab.profile(x) == doctest::Approx(ref.profile(x)).epsilon(2e-5));
    CHECK(tab.extrapolated(9.0));
    CHECK_FALSE(tab.extrapolated(1.0));
    const auto nt = potential_norms(tab, 1);
    const auto nr = potential_norms(ref, 1);
    CHECK(nt.w_l1.value == doctest::Approx(nr.w_l1.value).epsilon(1e-5));
    CHECK(nt.grad_linf.value == doctest::Approx(nr.grad_linf.value).epsilon(1e-4));
  }

  TEST_CASE("tabulated potential loads from a file") {
    aggdiff::test::TempDir dir("pot");
    const std::string path = dir.file("w.txt");
    {
      std::ofstream out(path);
      out << "r value\n0 -1\n0.5 -0.6\n1 -0.2\n2 0\n";
    }
    const auto w = PotentialSpec::load_tabulated(path);
    CHECK(w.kind() == PotentialKind::Tabulated);
    CHECK(w.profile(0.5) == doctest::Approx(-0.6));
    CHECK(w.far_field() == 0.0);
    CHECK_THROWS(PotentialSpec::load_tabulated(dir.file("missing.txt")));
  }

  TEST_CASE("radial transform of a gaussian is closed form") {
    const double A = -0.4, sigma = 1.3;
    for (int dim : {1, 2, 3}) {
      const RadialTransform rt(PotentialSpec::gaussian(A, sigma), dim, 10.0);
      for (double k : {0.0, 0.7, 2.5}) {
        const double hat = A * std::pow(kPi, dim / 2.0) * std::pow(sigma, dim) *
                           std::exp(-sigma * sigma * k * k / 4.0);
        CHECK(rt.value(k) == doctest::Approx(hat).epsilon(1e-13));
        CHECK(rt.virial(k) ==
              doctest::Approx(-(dim - sigma * sigma * k * k / 2.0) * hat).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("radial transform by quadrature agrees with direct hankel integrals") {
    const auto w = PotentialSpec::morse(0.8, 1.5);
    const auto g = [&](double r) { return w.profile(r) - w.far_field(); };
    const auto gv = [&](double r) { return r * w.profile_d1(r); };
    for (int dim : {1, 2}) {
      const RadialTransform rt(w, dim, 10.0);
      for (double k : {0.0, 0.5, 1.3, 4.0}) {
        CHECK(rt.value(k) == doctest::Approx(hankel(g, k, dim)).epsilon(1e-6).scale(1.0));
        CHECK(rt.virial(k) == doctest::Approx(hankel(gv, k, dim)).epsilon(1e-6).scale(1.0));
      }
    }
  }
}
