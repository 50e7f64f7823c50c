#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace latfrac {

struct CgResult {
  int iterations = 0;
  double residual = 0.0;       ///< final residual norm
  bool converged = false;
  bool curvature_stop = false; ///< stopped on a direction with p^T A p <= 0
};

/// Conjugate gradient for A x = b with a symmetric positive semidefinite, matrix-free A.
///
/// `apply(in, out)` must write A in into out. Iterates from the given x until
/// ||r|| <= tol * ||b|| (or tol * ||r_0|| when b = 0), the iteration cap is hit, or a
/// direction of zero curvature is met. Every iterate decreases the quadratic
/// 1/2 x^T A x - b^T x. Throws std::runtime_error on a non-finite residual.
template <class Apply>
CgResult conjugate_gradient(Apply&& apply, std::span<const double> b, std::span<double> x,
                            double tol, int max_iterations) {
  const std::size_t n = b.size();
  auto dot = [n](std::span<const double> a, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * c[i];
    return s;
  };
  std::vector<double> r(n), p(n), ap(n);
  apply(std::span<const double>(x.data(), n), std::span<double>(ap));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  double rr = dot(r, r);
  if (!std::isfinite(rr)) throw std::runtime_error("conjugate_gradient: non-finite residual");

  CgResult result;
  const double b_norm = std::sqrt(dot(b, b));
  const double target = tol * (b_norm > 0.0 ? b_norm : std::sqrt(rr));
  result.residual = std::sqrt(rr);
  if (result.residual <= target) {
    result.converged = true;
    return result;
  }
  p = r;
  for (int it = 0; it < max_iterations; ++it) {
    apply(std::span<const double>(p), std::span<double>(ap));
    const double curvature = dot(p, ap);
    if (!std::isfinite(curvature)) throw std::runtime_error("conjugate_gradient: non-finite operator");
    if (curvature <= 0.0) {
      result.curvature_stop = true;
      break;
    }
    const double alpha = rr / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_next = dot(r, r);
    if (!std::isfinite(rr_next)) throw std::runtime_error("conjugate_gradient: non-finite residual");
    result.iterations = it + 1;
    result.residual = std::sqrt(rr_next);
    if (result.residual <= target) {
      result.converged = true;
      break;
    }
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return result;
}

}  // namespace latfrac
