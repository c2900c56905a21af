#include <cmath>
#include <numbers>
#include <random>

#include "aggdiff/oracles.hpp"
#include "aggdiff/spectral.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aggdiff;
using aggdiff::test::max_diff;
using aggdiff::test::rel_linf;
using aggdiff::test::sample;

constexpr double kPi = std::numbers::pi;

TEST_SUITE("spectral") {
  TEST_CASE("grid geometry") {
    const GridPtr g = make_grid(1, 16, 8.0);
    CHECK(g->spacing() == 1.0);
    CHECK(g->coordinate(0, 0) == -8.0);
    CHECK(g->coordinate(8, 0) == 0.0);
    CHECK(g->wavenumber_spacing() == doctest::Approx(kPi / 8.0));

    const GridPtr g2 = make_grid(2, 256, 20.0);
    CHECK(g2->size() == 65536u);
    CHECK(g2->spacing() == doctest::Approx(0.15625));

    CHECK_THROWS_AS(make_grid(1, 17, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(4, 16, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 16, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 8, 1.0), std::invalid_argument);
  }

  TEST_CASE("constant field has only the zero mode") {
    const GridPtr g = make_grid(2, 16, 4.0);
    Field u(g);
    for (auto& v : u.values) v = 1.5;
    const Spectrum s = forward(u);
    // h^N (2 pi)^{-N/2} n^N = (2L)^N / (2 pi)^{N/2}
    CHECK(std::abs(s.coeffs[0]) == doctest::Approx(1.5 * 64.0 / (2.0 * kPi)).epsilon(1e-14));
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(std::abs(s.coeffs[i]) < 1e-12);
  }

  TEST_CASE("gaussian transform matches the continuous transform") {
    const GridPtr g = make_grid(1, 256, 20.0);
    const Field u = sample(g, [](const double* x) { return std::exp(-x[0] * x[0] / 2.0); });
    const Spectrum s = forward(u);
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double xi = g->wavenumbers()[i];
      err = std::max(err, std::abs(s.coeffs[i] - Complex(std::exp(-xi * xi / 2.0), 0.0)));
    }
    CHECK(err < 1e-10);
  }

  TEST_CASE("roundtrip of random fields") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int dim : {1, 2, 3}) {
      const GridPtr g = make_grid(dim, dim == 3 ? 16 : 64, 5.0);
      Field u(g);
      for (auto& v : u.values) v = nd(rng);
      CHECK(rel_linf(inverse(forward(u)), u) < 1e-12);
    }
  }

  TEST_CASE("plancherel") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    const GridPtr g = make_grid(2, 32, 3.0);
    Field u(g);
    for (auto& v : u.values) v = ud(rng);
    double l2 = 0.0;
    for (double v : u.values) l2 += v * v;
    l2 = std::sqrt(l2 * g->cell_volume());
    CHECK(spectral_l2(forward(u)) == doctest::Approx(l2).epsilon(1e-12));
  }

  TEST_CASE("first derivative of a periodic sine") {
    const double L = 4.0;
    const GridPtr g = make_grid(1, 64, L);
    const Field u = sample(g, [&](const double* x) { return std::sin(kPi * x[0] / L); });
    const Field exact =
        sample(g, [&](const double* x) { return kPi / L * std::cos(kPi * x[0] / L); });
    const int gamma[] = {1};
    CHECK(max_diff(inverse(spectral_derivative(forward(u), gamma)), exact) < 1e-12);
  }

  TEST_CASE("second derivative of a gaussian") {
    const GridPtr g = make_grid(1, 256, 20.0);
    const Field u = sample(g, [](const double* x) { return std::exp(-x[0] * x[0] / 2.0); });
    const Field exact = sample(
        g, [](const double* x) { return (x[0] * x[0] - 1.0) * std::exp(-x[0] * x[0] / 2.0); });
    const int gamma[] = {2};
    CHECK(max_diff(inverse(spectral_derivative(forward(u), gamma)), exact) < 1e-8);
  }

  TEST_CASE("mixed derivative in 2d") {
    const GridPtr g = make_grid(2, 128, 12.0);
    const Field u = sample(g, [](const double* x) {
      return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2.0);
    });
    const Field exact = sample(g, [](const double* x) {
      return x[0] * x[1] * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2.0);
    });
    const int gamma[] = {1, 1};
    CHECK(max_diff(inverse(spectral_derivative(forward(u), gamma)), exact) < 1e-10);
  }

  TEST_CASE("riesz power two is minus the laplacian") {
    const GridPtr g = make_grid(2, 64, 10.0);
    const Field u = sample(g, [](const double* x) {
      return std::exp(-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0);
    });
    const Spectrum s = forward(u);
    const int dxx[] = {2, 0}, dyy[] = {0, 2};
    Field lap = inverse(spectral_derivative(s, dxx)) + inverse(spectral_derivative(s, dyy));
    lap *= -1.0;
    CHECK(max_diff(inverse(riesz_power(s, 2.0)), lap) < 1e-10);
    CHECK(max_diff(inverse(riesz_power(s, 0.0)), u) < 1e-13);
    CHECK_THROWS(riesz_power(s, -1.0));
  }

  TEST_CASE("odd derivatives drop the nyquist mode") {
    const GridPtr g = make_grid(1, 16, 8.0);
    Field u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = (i % 2 == 0) ? 1.0 : -1.0;
    const int gamma[] = {1};
    const Field du = inverse(spectral_derivative(forward(u), gamma));
    CHECK(aggdiff::test::max_abs(du) < 1e-14);
  }

  TEST_CASE("gaussian convolution closes on gaussians") {
    for (int dim : {1, 2}) {
      const GridPtr g = make_grid(dim, dim == 1 ? 512 : 128, 16.0);
      const auto a = make_gaussian(dim, 1.0, 1.0);
      const auto b = make_gaussian(dim, 2.0, 0.5);
      const auto c = make_gaussian(dim, 2.0, 1.5);
      CHECK(rel_linf(convolve(sample_gaussian(a, g), sample_gaussian(b, g)),
                     sample_gaussian(c, g)) < 1e-8);
    }
  }

  TEST_CASE("fft convolution equals the direct riemann sum") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int dim : {1, 2}) {
      const GridPtr g = make_grid(dim, 32, 8.0);
      Field u(g), v(g);
      for (auto& x : u.values) x = ud(rng);
      for (auto& x : v.values) x = ud(rng);
      CHECK(rel_linf(convolve(u, v), direct_convolution(u, v)) < 1e-10);
    }
  }

  TEST_CASE("convolution faithfulness advisory") {
    const GridPtr g = make_grid(1, 128, 10.0);
    const Field narrow = sample_gaussian(make_gaussian(1, 1.0, 0.25), g);
    const Field wide = sample_gaussian(make_gaussian(1, 1.0, 16.0), g);
    CHECK(convolution_is_faithful(narrow, narrow));
    CHECK_FALSE(convolution_is_faithful(narrow, wide));
  }

  TEST_CASE("dealias mask keeps |k| < n/3") {
    const GridPtr g = make_grid(1, 16, 1.0);
    const auto mask = dealias_mask(*g);
    int kept = 0;
    for (double m : mask) kept += m > 0.5;
    CHECK(kept == 11);

    const GridPtr g2 = make_grid(2, 16, 1.0);
    int kept2 = 0;
    for (double m : dealias_mask(*g2)) kept2 += m > 0.5;
    CHECK(kept2 == 121);
  }

  TEST_CASE("scaled resampling of a gaussian") {
    const GridPtr g = make_grid(1, 256, 20.0);
    const Field u = sample_gaussian(make_gaussian(1, 1.0, 4.0), g);
    // u(2y) is proportional to a Gaussian of variance 1
    const Field exact = sample(g, [](const double* y) {
      return std::exp(-y[0] * y[0] / 2.0) / std::sqrt(8.0 * kPi);
    });
    CHECK(max_diff(resample_scaled(u, 2.0, g), exact) < 1e-10);
  }

  TEST_CASE("boundary mass fraction") {
    const GridPtr g = make_grid(1, 64, 8.0);
    CHECK(boundary_mass_fraction(sample_gaussian(make_gaussian(1, 1.0, 1.0), g)) < 1e-12);
    Field flat(g);
    for (auto& v : flat.values) v = 1.0;
    CHECK(boundary_mass_fraction(flat) > 0.01);
  }

  TEST_CASE("inverse rejects a non-hermitian spectrum") {
    const GridPtr g = make_grid(1, 16, 1.0);
    Spectrum s(g);
    s.coeffs[1] = Complex(0.0, 1.0);
    CHECK_THROWS_AS(inverse(s), std::runtime_error);
  }
}
