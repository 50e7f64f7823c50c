#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace latfrac {

/// Upper bound on the spatial dimension. Unused trailing components are zero.
inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;
using LatticeVector = std::array<int, kMaxDim>;
using MultiIndex = std::array<std::size_t, kMaxDim>;
using Matrix = std::array<std::array<double, kMaxDim>, kMaxDim>;

inline double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += a[k] * b[k];
  return s;
}

inline double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Point to_point(const LatticeVector& xi) {
  return {static_cast<double>(xi[0]), static_cast<double>(xi[1]),
          static_cast<double>(xi[2])};
}

inline int squared_length(const LatticeVector& xi) {
  return xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
}

inline LatticeVector negate(const LatticeVector& xi) { return {-xi[0], -xi[1], -xi[2]}; }

inline bool is_zero(const LatticeVector& xi) { return xi[0] == 0 && xi[1] == 0 && xi[2] == 0; }

/// Greatest common divisor of the component magnitudes (0 for the zero vector).
inline int lattice_gcd(const LatticeVector& xi) {
  return std::gcd(std::gcd(std::abs(xi[0]), std::abs(xi[1])), std::abs(xi[2]));
}

inline LatticeVector unit_vector(int axis) {
  LatticeVector e{0, 0, 0};
  e[axis] = 1;
  return e;
}

inline double trace(const Matrix& m, int dim) {
  double t = 0.0;
  for (int k = 0; k < dim; ++k) t += m[k][k];
  return t;
}

/// Frobenius norm squared of the leading dim x dim block.
inline double frobenius_sq(const Matrix& m, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += m[i][j] * m[i][j];
  return s;
}

inline Matrix symmetric_part(const Matrix& m, int dim) {
  Matrix e{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) e[i][j] = 0.5 * (m[i][j] + m[j][i]);
  return e;
}

}  // namespace latfrac
