#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "latfrac/geometry.hpp"

namespace latfrac {

/// Axis-aligned box (origin, side lengths) in dimension 2 or 3.
struct Box {
  int dim = 2;
  Point origin{0.0, 0.0, 0.0};
  Point lengths{1.0, 1.0, 0.0};

  Point upper() const {
    Point p{};
    for (int k = 0; k < dim; ++k) p[k] = origin[k] + lengths[k];
    return p;
  }
  double volume() const {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= lengths[k];
    return v;
  }
  static Box unit(int dim) {
    Box b;
    b.dim = dim;
    b.lengths = {1.0, 1.0, dim == 3 ? 1.0 : 0.0};
    return b;
  }
};

enum class Side { lower, upper };

/// A closed patch of one face of the box, {x_axis = face} x prod_{j != axis} [lo_j, hi_j].
/// The default bounds select the whole face.
struct DirichletFace {
  int axis = 0;
  Side side = Side::lower;
  Point lo{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
  Point hi{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
};

/// Declares the Dirichlet part of the boundary.
///
/// In extended mode the lattice grows by `collar` node layers beyond every declared
/// face (whole faces only); those layers model the exterior strip of the enlarged
/// domain and are flagged Dirichlet together with the face nodes themselves.
struct DirichletSpec {
  std::vector<DirichletFace> faces;
  bool extended = false;
  int collar = 2;

  static DirichletSpec none() { return {}; }
  static DirichletSpec full_boundary(int dim);
  static DirichletSpec opposite_faces(int axis);
};

using NodeMask = std::vector<std::uint8_t>;

/// The lattice delta Z^d clipped to a box, with active and Dirichlet masks.
///
/// Nodes are stored row-major with the last axis fastest. Immutable after
/// construction; share it through `std::shared_ptr<const LatticeDomain>`.
class LatticeDomain {
 public:
  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  /// Position of node 0 (includes any collar).
  const Point& origin() const { return origin_; }
  /// Per-axis node counts; axes beyond dim() report 1.
  const MultiIndex& extents() const { return extents_; }
  /// The physical box Omega (without collar).
  const Box& box() const { return box_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t active_count() const { return active_count_; }

  std::size_t flat(const MultiIndex& index) const;
  MultiIndex multi(std::size_t node) const;
  Point position(std::size_t node) const;

  bool active(std::size_t node) const { return active_[node] != 0; }
  bool dirichlet(std::size_t node) const { return dirichlet_[node] != 0; }
  bool in_collar(std::size_t node) const { return collar_[node] != 0; }
  const NodeMask& active_mask() const { return active_; }
  const NodeMask& dirichlet_mask() const { return dirichlet_; }

  /// Signed flat-index offset of the lattice vector xi.
  std::ptrdiff_t offset(const LatticeVector& xi) const;
  /// True if node + xi stays inside the index grid.
  bool in_grid(std::size_t node, const LatticeVector& xi) const;
  /// Flat index of node + xi; requires in_grid.
  std::size_t shifted(std::size_t node, const LatticeVector& xi) const {
    return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(node) + offset(xi));
  }

  bool same_geometry(const LatticeDomain& other) const;

 private:
  friend std::shared_ptr<const LatticeDomain> build_domain(
      const Box&, double, const DirichletSpec&, const std::function<bool(const Point&)>&);

  int dim_ = 2;
  double spacing_ = 1.0;
  Point origin_{};
  MultiIndex extents_{1, 1, 1};
  std::array<std::ptrdiff_t, kMaxDim> strides_{};
  Box box_{};
  std::size_t node_count_ = 0;
  std::size_t active_count_ = 0;
  NodeMask active_;
  NodeMask dirichlet_;
  NodeMask collar_;
};

using DomainPtr = std::shared_ptr<const LatticeDomain>;

/// Builds the lattice for `box` with spacing `delta`.
///
/// Nodes are origin + delta * i for i_k = 0..floor(L_k / delta). A node is active
/// when it lies in the closed box and satisfies the optional `mask` predicate. A node
/// is Dirichlet when its cell alpha + [0, delta)^d meets a declared face patch.
/// Throws std::invalid_argument for delta <= 0, unsupported dimension, side lengths
/// below 2 delta, or an empty active set.
DomainPtr build_domain(const Box& box, double delta, const DirichletSpec& dirichlet = {},
                       const std::function<bool(const Point&)>& mask = {});

/// Lattice directions with kernel weights depending only on |xi|.
struct DirectionSet {
  int dim = 2;
  std::vector<LatticeVector> vectors;
  double sigma_1 = 1.0;
  double sigma_sqrt2 = 1.0;
  double sigma_sqrt3 = 0.0;

  double weight(const LatticeVector& xi) const;
  /// Copy with replaced weights; throws if a weight used by this dimension is not positive.
  DirectionSet with_weights(double s1, double s2, double s3) const;
};

/// {e_i} u {e_i +- e_j, i<j} u (d = 3 only) {e_1 +- e_2 +- e_3} with the weights that
/// turn the direction sum into |M|^2 + (tr M)^2 / 2. Throws for d not in {2, 3}.
DirectionSet direction_set(int dim);

/// Nodes alpha whose segment [alpha - delta xi, alpha + delta xi] lies in the domain.
///
/// For a masked domain every lattice point of the segment must be active; `subset`
/// restricts membership further (localized energies). Throws for xi = 0.
std::vector<std::size_t> range_nodes(const LatticeDomain& domain, const LatticeVector& xi,
                                     const NodeMask* subset = nullptr);

/// Intersection of range_nodes over the coordinate axes.
std::vector<std::size_t> range_div(const LatticeDomain& domain,
                                   const NodeMask* subset = nullptr);

}  // namespace latfrac
