#include <cmath>
#include <numbers>

#include "aggdiff/oracles.hpp"
#include "aggdiff/quadrature.hpp"
#include "aggdiff/solver.hpp"
#include "aggdiff/spectral.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace aggdiff;
using aggdiff::test::max_abs;
using aggdiff::test::max_diff;
using aggdiff::test::rel_linf;

constexpr double kPi = std::numbers::pi;

namespace {

Field run(const Field& rho0, const SampledPotential& w, Scheme scheme, double dt, double t_end) {
  SolverConfig cfg;
  cfg.scheme = scheme;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.diagnostics_every = 1000000;
  return simulate(rho0, w, cfg).final_state;
}

double observed_order(Scheme scheme, double dt_coarse) {
  const GridPtr g = make_grid(1, 128, 10.0);
  const auto w = sample_on_grid(PotentialSpec::gaussian(-3.0, 1.0), g);
  const Field rho0 = sample_gaussian(make_gaussian(1, 1.0, 0.5, {0.3}), g);
  const double T = 0.5;
  const Field ref = run(rho0, w, scheme, dt_coarse / 16.0, T);
  const double e1 = max_diff(run(rho0, w, scheme, dt_coarse, T), ref);
  const double e2 = max_diff(run(rho0, w, scheme, dt_coarse / 2.0, T), ref);
  return std::log2(e1 / e2);
}

Field divergence(const Field& flux) {
  const int gamma[] = {1};
  return inverse(spectral_derivative(forward(flux), gamma));
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("etd phi functions") {
    CHECK(etd_phi(0, 0.0) == 1.0);
    CHECK(etd_phi(1, 0.0) == 1.0);
    CHECK(etd_phi(2, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(etd_phi(3, 0.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    const double z = -2.0, e = std::exp(z);
    CHECK(etd_phi(1, z) == doctest::Approx((e - 1.0) / z).epsilon(1e-14));
    CHECK(etd_phi(2, z) == doctest::Approx((e - 1.0 - z) / (z * z)).epsilon(1e-14));
    CHECK(etd_phi(3, z) == doctest::Approx((e - 1.0 - z - z * z / 2.0) / (z * z * z)).epsilon(1e-13));
    for (int k = 1; k <= 3; ++k)
      CHECK(etd_phi(k, -0.9999999) == doctest::Approx(etd_phi(k, -1.0000001)).epsilon(1e-6));
  }

  TEST_CASE("config validation and names") {
    SolverConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS(cfg.validate());
    cfg.dt = 0.1;
    cfg.diagnostics_every = 0;
    CHECK_THROWS(cfg.validate());
    CHECK(parse_scheme("etdrk2") == Scheme::EtdRk2);
    CHECK(std::string(scheme_name(Scheme::EtdRk4)) == "etdrk4");
    CHECK(parse_clip_policy("error_above_threshold") == ClipPolicy::ErrorAboveThreshold);
    CHECK(std::string(clip_policy_name(ClipPolicy::ClipAndCount)) == "clip_and_count");
    CHECK_THROWS(parse_scheme("euler"));
  }

  TEST_CASE("heat flow is exact for zero interaction") {
    const GridPtr g = make_grid(1, 256, 30.0);
    const auto w = sample_on_grid(PotentialSpec::zero(), g);
    const auto g0 = make_gaussian(1, 1.0, 1.0);
    SolverConfig cfg;
    cfg.dt = 0.05;
    CHECK(rel_linf(step(sample_gaussian(g0, g), w, cfg), sample_gaussian(exact_heat(g0, 0.05), g)) <
          1e-10);
  }

  TEST_CASE("zero step is the identity") {
    const GridPtr g = make_grid(1, 64, 10.0);
    const auto w = sample_on_grid(PotentialSpec::gaussian(-1.0, 1.0), g);
    const Field rho = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    SolverConfig cfg;
    cfg.dt = 0.0;
    CHECK(step(rho, w, cfg).values == rho.values);
  }

  TEST_CASE("zero data stays zero") {
    const GridPtr g = make_grid(2, 32, 6.0);
    const auto w = sample_on_grid(PotentialSpec::gaussian(-1.0, 1.0), g);
    const Field out = run(Field(g), w, Scheme::EtdRk4, 0.1, 1.0);
    CHECK(max_abs(out) == 0.0);
  }

  TEST_CASE("temporal order") {
    CHECK(observed_order(Scheme::EtdRk2, 0.05) >= 1.9);
    CHECK(observed_order(Scheme::EtdRk4, 0.05) >= 3.8);
  }

  TEST_CASE("mass is conserved") {
    const GridPtr g = make_grid(2, 128, 10.0);
    const auto w = sample_on_grid(PotentialSpec::gaussian(-0.5, 1.0), g);
    InitialDataSpec spec;
    spec.kind = InitialKind::TwoGaussians;
    spec.center = {1.0, 0.0};
    spec.center2 = {-1.5, 0.5};
    spec.sigma2 = 0.7;
    const Field rho0 = make_initial(spec, g);
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    const auto res = simulate(rho0, w, cfg);
    CHECK(res.clips.clipped_values == 0);
    CHECK(res.final_state.integral() == doctest::Approx(rho0.integral()).epsilon(1e-12));
  }

  TEST_CASE("nonlinear term against a direct convolution") {
    const GridPtr g = make_grid(1, 32, 8.0);
    const auto w = sample_on_grid(PotentialSpec::gaussian(-1.0, 1.0), g);
    const Field rho = sample_gaussian(make_gaussian(1, 1.0, 0.8, {0.4}), g);
    Field flux = direct_convolution(w.gradient[0], rho);
    for (std::size_t i = 0; i < flux.size(); ++i) flux[i] *= rho[i];
    const Field ref = divergence(flux);
    CHECK(max_diff(rhs_nonlinear(rho, w, false), ref) < 1e-6 * max_abs(ref));
  }

  TEST_CASE("nonlinear term has no net first moment") {
    const GridPtr g = make_grid(1, 256, 20.0);
    const auto w = sample_on_grid(PotentialSpec::morse(0.5, 2.0), g);
    const Field rho = 0.3 * sample_gaussian(make_gaussian(1, 1.0, 0.6, {-1.0}), g) +
                      sample_gaussian(make_gaussian(1, 1.0, 1.2, {2.0}), g);
    const Field r = rhs_nonlinear(rho, w);
    double moment = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) moment += g->coordinate(i, 0) * r[i];
    CHECK(std::abs(moment * g->cell_volume()) < 1e-12);
    CHECK(std::abs(r.integral()) < 1e-13);
    CHECK(max_abs(rhs_nonlinear(rho, sample_on_grid(PotentialSpec::zero(), g))) == 0.0);
  }

  TEST_CASE("simulation records") {
    const GridPtr g = make_grid(1, 256, 40.0);
    const auto zero = sample_on_grid(PotentialSpec::zero(), g);
    const Field rho0 = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    SolverConfig cfg;
    cfg.t_end = 0.0;
    CHECK(simulate(rho0, zero, cfg).series.rows() == 1);

    cfg.t_end = 2.0;
    cfg.dt = 0.05;
    cfg.diagnostics_every = 4;
    int calls = 0;
    const auto res = simulate(rho0, zero, cfg, {},
                              [&](double, const Field&, const std::vector<double>&) { ++calls; });
    CHECK(res.steps == 40);
    CHECK(res.series.rows() == 11);
    CHECK(calls == 11);
    const auto& t = res.series.column("t");
    const auto& l2 = res.series.column("l2");
    for (std::size_t i = 0; i < t.size(); ++i)
      CHECK(l2[i] == doctest::Approx(std::pow(4.0 * kPi * (1.0 + 2.0 * t[i]), -0.25)).epsilon(1e-8));
    CHECK(res.clips.clipped_values == 0);
  }

  TEST_CASE("clip policies") {
    const GridPtr g = make_grid(1, 16, 4.0);
    Field u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1.0;
    u[3] = -1e-3;
    u[5] = -1e-14;
    SolverConfig cfg;
    ClipStats stats;
    Field v = u;
    apply_clip_policy(v, cfg, stats, 0.0);
    CHECK(v[3] == 0.0);
    CHECK(v[5] == -1e-14);
    CHECK(stats.clipped_values == 1);
    CHECK(stats.steps_with_clipping == 1);
    CHECK(stats.most_negative == -1e-3);

    cfg.clip_policy = ClipPolicy::ErrorAboveThreshold;
    cfg.negative_threshold = 1e-8;
    Field w = u;
    CHECK_THROWS_AS(apply_clip_policy(w, cfg, stats, 0.5), std::runtime_error);
    cfg.negative_threshold = 1e-2;
    CHECK_NOTHROW(apply_clip_policy(w, cfg, stats, 0.5));
  }

  TEST_CASE("initial data") {
    const GridPtr g = make_grid(2, 128, 12.0);
    InitialDataSpec spec;
    spec.mass = 2.5;
    spec.center = {0.5, -0.5};
    CHECK(make_initial(spec, g).integral() == doctest::Approx(2.5).epsilon(1e-10));
    spec.kind = InitialKind::TwoGaussians;
    spec.center2 = {-2.0, 1.0};
    spec.weight = 0.3;
    CHECK(make_initial(spec, g).integral() == doctest::Approx(2.5).epsilon(1e-10));
    spec.kind = InitialKind::SmoothedIndicator;
    spec.radius = 2.0;
    spec.edge = 0.3;
    const Field ind = make_initial(spec, g);
    CHECK(ind.integral() == doctest::Approx(2.5).epsilon(1e-10));
    spec.center = {0.0};
    CHECK_THROWS(make_initial(spec, g));
    spec.center = {};
    spec.weight = 1.5;
    spec.kind = InitialKind::TwoGaussians;
    CHECK_THROWS(make_initial(spec, g));
  }

  TEST_CASE("trajectory interpolation reproduces its nodes") {
    const GridPtr g = make_grid(1, 64, 12.0);
    Trajectory tr;
    tr.times = Trajectory::lobatto_times(2.0, 9);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == doctest::Approx(2.0));
    const auto g0 = make_gaussian(1, 1.0, 1.0);
    for (double t : tr.times) tr.states.push_back(sample_gaussian(exact_heat(g0, t), g));
    CHECK(max_diff(tr.at(tr.times[4]), tr.states[4]) < 1e-14);
    tr.heat_anchor = tr.states.front();
    CHECK(rel_linf(tr.at(0.77), sample_gaussian(exact_heat(g0, 0.77), g)) < 1e-10);
    CHECK_THROWS(tr.at(2.5));
  }

  TEST_CASE("duhamel integral against brute-force quadrature") {
    const GridPtr g = make_grid(1, 64, 12.0);
    const auto w = sample_on_grid(PotentialSpec::gaussian(-1.0, 1.0), g);
    const Interaction inter(w);
    const auto g0 = make_gaussian(1, 1.0, 1.0);
    const double T = 1.0;
    Trajectory tr;
    tr.times = Trajectory::lobatto_times(T, 25);
    for (double t : tr.times) tr.states.push_back(sample_gaussian(exact_heat(g0, t), g));
    tr.heat_anchor = tr.states.front();
    const Field b = duhamel_bilinear(tr, tr, T, inter, 128, false);

    // int_0^T e^{(T-s) Delta} div(rho_s (grad W * rho_s)) ds by Gauss-Legendre in s
    const auto [nodes, weights] = gauss_legendre(64);
    Spectrum acc(g);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double s = 0.5 * T * (nodes[q] + 1.0);
      const Field rho = sample_gaussian(exact_heat(g0, s), g);
      Field flux = direct_convolution(w.gradient[0], rho);
      for (std::size_t i = 0; i < flux.size(); ++i) flux[i] *= rho[i];
      const Spectrum d = forward(divergence(flux));
      for (std::size_t k = 0; k < d.size(); ++k)
        acc.coeffs[k] += 0.5 * T * weights[q] *
                         std::exp(-(T - s) * g->wavenumber_squared()[k]) * d.coeffs[k];
    }
    const Field ref = inverse(acc);
    CHECK(max_diff(b, ref) < 1e-6 * max_abs(ref));

    const Field none = duhamel_bilinear(tr, tr, T, Interaction(), 32, false);
    CHECK(max_abs(none) == 0.0);
  }

  TEST_CASE("picard iteration") {
    const GridPtr g = make_grid(1, 64, 16.0);
    const Field rho0 = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    PicardConfig cfg;
    cfg.horizon = 0.5;
    cfg.time_nodes = 9;
    cfg.quadrature_nodes = 32;

    const auto zero = duhamel_picard(rho0, sample_on_grid(PotentialSpec::zero(), g), cfg);
    CHECK(zero.converged);
    CHECK(zero.iterations == 1);

    const auto weak = sample_on_grid(PotentialSpec::gaussian(-0.05, 1.0), g);
    const auto res = duhamel_picard(rho0, weak, cfg);
    CHECK(res.converged);
    for (std::size_t k = 1; k < res.residuals.size(); ++k)
      CHECK(res.residuals[k] < res.residuals[k - 1]);
    SolverConfig sc;
    sc.dt = 0.005;
    sc.t_end = cfg.horizon;
    sc.dealias = cfg.dealias;
    const Field etd = simulate(rho0, weak, sc).final_state;
    CHECK(max_diff(res.trajectory.states.back(), etd) < 1e-6);

    PicardConfig hard = cfg;
    hard.horizon = 4.0;
    hard.max_iter = 15;
    const auto strong = duhamel_picard(rho0, sample_on_grid(PotentialSpec::gaussian(-40.0, 1.0), g), hard);
    CHECK_FALSE(strong.converged);
  }

  TEST_CASE("contraction margin") {
    const auto norms = potential_norms(PotentialSpec::gaussian(-0.1, 1.0), 1);
    CHECK(contraction_margin(norms, 0.4, 0.0, INFINITY) == 0.0);
    CHECK(contraction_margin(norms, 0.4, 0.25, INFINITY) ==
          doctest::Approx(4.0 * 0.5 * norms.grad_l1.value * 0.4).epsilon(1e-14));
    CHECK(contraction_margin(norms, 0.4, 0.25, 1.0) ==
          doctest::Approx(4.0 * 0.5 * norms.grad_linf.value * 0.4).epsilon(1e-14));
  }

  TEST_CASE("sobolev norm") {
    const GridPtr g = make_grid(1, 2048, 20.0);
    const Field u = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    CHECK(sobolev_norm(u, 0, 2.0) == doctest::Approx(lp_norm(u, 2.0)).epsilon(1e-14));
    // ||G'||_1 = 2 G(0)
    CHECK(sobolev_norm(u, 1, 1.0) ==
          doctest::Approx(1.0 + 2.0 / std::sqrt(2.0 * kPi)).epsilon(1e-4));
  }

  TEST_CASE("velocity bound") {
    const GridPtr g = make_grid(1, 128, 20.0);
    const Field rho = sample_gaussian(make_gaussian(1, 1.0, 1.0), g);
    CHECK(max_velocity(rho, Interaction()) == 0.0);
    const auto w = sample_on_grid(PotentialSpec::gaussian(-1.0, 1.0), g);
    const double v = max_velocity(rho, Interaction(w));
    CHECK(v > 0.0);
    CHECK(v <= potential_norms(w.spec, 1).grad_linf.value * 1.0 + 1e-12);
  }
}
