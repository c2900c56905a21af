#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace aggdiff {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) integration on [a, b], bisecting the worst
/// interval until the error estimate drops below max(abs_tol, rel_tol |I|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-10, double abs_tol = 0.0,
                           int max_intervals = 4000);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Maximizes f on [a, b] by dense sampling followed by golden-section refinement.
/// Returns (argmax, max).
std::pair<double, double> maximize(const std::function<double(double)>& f, double a, double b,
                                   int samples = 4000);

}  // namespace aggdiff
