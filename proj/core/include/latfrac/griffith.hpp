#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "latfrac/field.hpp"

namespace latfrac {

using JacobianFunction = std::function<Matrix(const Point&)>;

/// A box-shaped piece of Omega on which the target displacement is smooth.
struct SmoothRegion {
  Box box;
  VectorFunction displacement;
  JacobianFunction jacobian;  ///< optional; central differences are used when empty
};

/// Planar crack on the hyperplane {x_d = offset}. `lower` / `upper` bound the crack
/// piece K in the tangential coordinates x' (the first d-1 axes).
struct CrackGeometry {
  double offset = 0.5;
  Point lower{0.0, 0.0, 0.0};
  Point upper{0.0, 0.0, 0.0};
  /// Crack spans Omega from face to face; K is the full cross-section.
  bool full_line = false;

  /// H^{d-1}(K cap Omega).
  double measure(const Box& omega) const;
  /// Euclidean distance from x' to K in the tangential coordinates.
  double tangential_distance(const Point& x, const Box& omega) const;
};

/// Piecewise-smooth continuum target used as the reference for sweeps and
/// recovery constructions.
struct GriffithReference {
  Box omega;
  std::vector<SmoothRegion> regions;
  std::optional<CrackGeometry> crack;
  /// H^{d-1} of the part of the Dirichlet boundary where the trace misses the datum.
  double dirichlet_mismatch = 0.0;

  /// Displacement at x, from the first region whose closed box contains x.
  Point displacement(const Point& x) const;

  /// u(x) = A x + b on all of Omega, no crack.
  static GriffithReference affine(const Box& omega, const Matrix& a, const Point& b = {});
  /// u = 0 below the plane {x_d = offset} and u = jump above; a face-to-face crack.
  static GriffithReference planar_jump(const Box& omega, double offset, const Point& jump);
};

struct QuadratureOptions {
  int order = 6;         ///< Gauss points per axis and sub-cell (>= 4)
  int subdivisions = 4;  ///< sub-cells per axis per region
};

struct GriffithValue {
  double elastic = 0.0;     ///< integral of |Eu|^2
  double divergence = 0.0;  ///< integral of (div u)^2
  double surface = 0.0;     ///< crack measure plus Dirichlet mismatch
  double total = 0.0;       ///< lambda * elastic + (lambda / 2 + theta) * divergence + surface
  double bulk() const { return total - surface; }
};

/// Evaluates the Griffith functional of the reference by tensor-product Gauss quadrature.
/// Throws std::invalid_argument for order < 4 and std::runtime_error on a non-finite integrand.
GriffithValue griffith_energy(const GriffithReference& ref, double lambda, double theta,
                              const QuadratureOptions& options = {});

}  // namespace latfrac
