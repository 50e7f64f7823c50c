#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "latfrac/lattice.hpp"

namespace latfrac {

using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<Point(const Point&)>;

/// Node-indexed real values v : Omega_delta -> R.
class ScalarField {
 public:
  ScalarField(DomainPtr domain, std::vector<double> values);
  static ScalarField constant(DomainPtr domain, double value);
  static ScalarField sample(DomainPtr domain, const ScalarFunction& f);

  const LatticeDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t node) const { return values_[node]; }
  double& operator[](std::size_t node) { return values_[node]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

/// Node-indexed displacements u : Omega_delta -> R^d, components interleaved per node.
class VectorField {
 public:
  VectorField(DomainPtr domain, std::vector<double> values);
  static VectorField zero(DomainPtr domain);
  static VectorField sample(DomainPtr domain, const VectorFunction& f);

  const LatticeDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  int dim() const { return domain_->dim(); }
  std::size_t node_count() const { return values_.size() / static_cast<std::size_t>(dim()); }

  double operator()(std::size_t node, int comp) const {
    return values_[node * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(comp)];
  }
  double& operator()(std::size_t node, int comp) {
    return values_[node * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(comp)];
  }
  Point at(std::size_t node) const;
  void set(std::size_t node, const Point& value);

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;
  /// max over active nodes of the Euclidean norm |u(alpha)|.
  double max_norm() const;

 private:
  DomainPtr domain_;
  std::vector<double> values_;
};

/// Overwrites Dirichlet-masked nodes with datum(alpha); other nodes are untouched.
void apply_dirichlet(VectorField& field, const VectorFunction& datum);
/// Overwrites Dirichlet-masked nodes of a phase field with `value` (1 by default).
void apply_dirichlet(ScalarField& field, double value = 1.0);

/// Throws std::invalid_argument unless both objects live on the same lattice.
void require_same_domain(const LatticeDomain& a, const LatticeDomain& b, const char* where);

}  // namespace latfrac
