#pragma once

#include <functional>
#include <vector>

namespace latfrac {

struct GaussRule {
  std::vector<double> nodes;    ///< on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (exact for polynomials of degree 2n - 1).
GaussRule gauss_legendre(int n);

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance `tol`.
/// Throws std::runtime_error when the integrand is not finite or the recursion
/// depth is exhausted before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

}  // namespace latfrac
