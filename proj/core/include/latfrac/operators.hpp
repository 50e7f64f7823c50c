#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "latfrac/field.hpp"

namespace latfrac {

// Pointwise finite-difference stencils. Range validity (all touched nodes active)
// is the caller's responsibility; debug builds assert on it.

/// Orientation (k_1, ..., k_d) in {-1, +1}^d of the axis directions in a directed divergence.
struct SignPattern {
  int dim = 2;
  std::array<int, kMaxDim> k{1, 1, 1};
};

/// All 2^d patterns, lexicographic with -1 before +1.
const std::vector<SignPattern>& sign_patterns(int dim);

enum class DivergencePart { positive, negative };

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }
inline double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

/// <u(alpha + delta xi) - u(alpha), xi / |xi|^2>.
inline double diff_quot(const VectorField& u, std::size_t node, const LatticeVector& xi) {
  const LatticeDomain& d = u.domain();
  assert(d.in_grid(node, xi) && d.active(node) && d.active(d.shifted(node, xi)));
  const std::size_t far = d.shifted(node, xi);
  const double inv_len_sq = 1.0 / static_cast<double>(squared_length(xi));
  double s = 0.0;
  for (int k = 0; k < d.dim(); ++k) s += (u(far, k) - u(node, k)) * xi[k];
  return s * inv_len_sq;
}

/// |D^xi u|^2 + |D^{-xi} u|^2.
inline double sym_pair_sq(const VectorField& u, std::size_t node, const LatticeVector& xi) {
  const double a = diff_quot(u, node, xi);
  const double b = diff_quot(u, node, negate(xi));
  return a * a + b * b;
}

/// v(alpha + delta xi) - v(alpha).
inline double delta_scalar(const ScalarField& v, std::size_t node, const LatticeVector& xi) {
  const LatticeDomain& d = v.domain();
  assert(d.in_grid(node, xi));
  return v[d.shifted(node, xi)] - v[node];
}

/// Sum over axes of D^{k_i e_i} u(alpha): a (d+1)-point directed divergence.
inline double div_directed(const VectorField& u, std::size_t node, const SignPattern& s) {
  const LatticeDomain& d = u.domain();
  double sum = 0.0;
  for (int i = 0; i < d.dim(); ++i) {
    LatticeVector dir{0, 0, 0};
    dir[i] = s.k[i];
    assert(d.in_grid(node, dir));
    // <u(alpha + k e_i) - u(alpha), k e_i> / |k e_i|^2 = k (u_i(alpha + k e_i) - u_i(alpha))
    sum += s.k[i] * (u(d.shifted(node, dir), i) - u(node, i));
  }
  return sum;
}

/// |Div u(alpha)|^2: sum of squared directed divergences over all sign patterns.
double div_sq_total(const VectorField& u, std::size_t node);

/// |Div^{+-} u(alpha)|^2: sum of squared positive or negative parts.
double div_pm_sq(const VectorField& u, std::size_t node, DivergencePart part);

}  // namespace latfrac
