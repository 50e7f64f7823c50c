#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "latfrac/field.hpp"

namespace latfrac {

/// One simplex of the Freudenthal partition of [0,1]^d: the monotone chain
/// 0, e_{p_1}, e_{p_1} + e_{p_2}, ..., (1,...,1) for a permutation p.
struct Simplex {
  int dim = 2;
  std::array<int, kMaxDim> order{0, 1, 2};
  std::vector<LatticeVector> vertices;  ///< d + 1 chain vertices
  std::vector<LatticeVector> edges;     ///< s_j - s_i for i < j, d(d+1)/2 entries

  /// |det| of the edge vectors from vertex 0; the volume is this over d!.
  long long volume_times_factorial() const;
  /// Membership in the closed simplex for a local point t in [0,1]^d.
  bool contains(const Point& t, double tol = 0.0) const;
  /// Barycentric coordinates of t with respect to `vertices`.
  std::array<double, kMaxDim + 1> barycentric(const Point& t) const;
};

/// The d! simplices in lexicographic order of their permutations. Throws for d not in {2, 3}.
std::vector<Simplex> freudenthal(int dim);

/// Index of the first simplex (in freudenthal order) containing the local point t.
/// Throws std::out_of_range when t is outside the unit cube.
std::size_t locate_simplex(int dim, const Point& t);

/// Continuous piecewise-affine interpolant of nodal values on the cells alpha + delta T.
///
/// Defined on every cell whose 2^d corners are active. Queries on shared faces go to
/// the lexicographically first simplex; the value is the same from either side.
class PiecewiseAffine {
 public:
  explicit PiecewiseAffine(const ScalarField& field);
  explicit PiecewiseAffine(const VectorField& field);

  int components() const { return comps_; }
  const LatticeDomain& domain() const { return *domain_; }

  /// Throws std::out_of_range outside the triangulated region.
  double value(const Point& x, int comp = 0) const;
  Point vector_value(const Point& x) const;
  /// Constant gradient on the simplex owning x; row r is the gradient of component r.
  Matrix jacobian(const Point& x) const;

 private:
  struct Location {
    std::size_t base = 0;  ///< lower corner node of the cell
    Point local{};         ///< coordinates in [0,1]^d
    std::size_t simplex = 0;
  };
  Location locate(const Point& x) const;
  double nodal(std::size_t node, int comp) const {
    return values_[node * static_cast<std::size_t>(comps_) + static_cast<std::size_t>(comp)];
  }

  DomainPtr domain_;
  int comps_ = 1;
  std::vector<double> values_;
  std::vector<Simplex> simplices_;
};

/// Piecewise-constant field on cells alpha + [0, delta)^d, indexed by the lower corner alpha.
struct CellField {
  DomainPtr domain;
  std::vector<double> values;  ///< one entry per node; meaningful where `valid` is set
  NodeMask valid;
  std::size_t skipped = 0;     ///< cells dropped because a corner is inactive
};

/// Per-cell minimum of v over the 2^d cell corners.
CellField vmin_cell(const ScalarField& v);

/// Discrete translation T_y of a nodal field. For y in [0,1)^d the cell owner of
/// alpha + delta y is alpha itself, so the nodal values are returned unchanged.
/// Throws std::invalid_argument for y outside [0,1)^d.
ScalarField translate(const ScalarField& field, const Point& y);
VectorField translate(const VectorField& field, const Point& y);

/// Samples a continuum function at the shifted points alpha + delta y.
ScalarField sample_translated(const DomainPtr& domain, const ScalarFunction& f, const Point& y);
VectorField sample_translated(const DomainPtr& domain, const VectorFunction& f, const Point& y);

/// Hat-function interpolation of samples at origin + i delta.
class HatInterpolant1D {
 public:
  /// Throws std::invalid_argument for fewer than two samples or delta <= 0.
  HatInterpolant1D(std::vector<double> samples, double delta, double origin = 0.0);

  /// Throws std::out_of_range outside [origin, origin + (n-1) delta].
  double operator()(double t) const;
  double slope(double t) const;
  double length() const { return delta_ * static_cast<double>(samples_.size() - 1); }

 private:
  std::size_t segment(double t) const;

  std::vector<double> samples_;
  double delta_;
  double origin_;
};

HatInterpolant1D pc_to_affine_1d(std::vector<double> samples, double delta, double origin = 0.0);

}  // namespace latfrac
