#include "latfrac/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace latfrac {

namespace {

bool finite_range(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void require_same_domain(const LatticeDomain& a, const LatticeDomain& b, const char* where) {
  if (!a.same_geometry(b))
    throw std::invalid_argument(std::string(where) + ": fields live on different lattices");
}

ScalarField::ScalarField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw std::invalid_argument("ScalarField: null domain");
  if (values_.size() != domain_->node_count())
    throw std::invalid_argument("ScalarField: value count " + std::to_string(values_.size()) +
                                " does not match node count " +
                                std::to_string(domain_->node_count()));
}

ScalarField ScalarField::constant(DomainPtr domain, double value) {
  const std::size_t n = domain->node_count();
  return ScalarField(std::move(domain), std::vector<double>(n, value));
}

ScalarField ScalarField::sample(DomainPtr domain, const ScalarFunction& f) {
  std::vector<double> values(domain->node_count());
  for (std::size_t n = 0; n < values.size(); ++n) values[n] = f(domain->position(n));
  return ScalarField(std::move(domain), std::move(values));
}

bool ScalarField::all_finite() const { return finite_range(values_); }

VectorField::VectorField(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw std::invalid_argument("VectorField: null domain");
  const std::size_t expected = domain_->node_count() * static_cast<std::size_t>(domain_->dim());
  if (values_.size() != expected)
    throw std::invalid_argument("VectorField: value count " + std::to_string(values_.size()) +
                                " does not match " + std::to_string(expected));
}

VectorField VectorField::zero(DomainPtr domain) {
  const std::size_t n = domain->node_count() * static_cast<std::size_t>(domain->dim());
  return VectorField(std::move(domain), std::vector<double>(n, 0.0));
}

VectorField VectorField::sample(DomainPtr domain, const VectorFunction& f) {
  VectorField field = zero(domain);
  for (std::size_t n = 0; n < domain->node_count(); ++n) field.set(n, f(domain->position(n)));
  return field;
}

Point VectorField::at(std::size_t node) const {
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim(); ++k) p[k] = (*this)(node, k);
  return p;
}

void VectorField::set(std::size_t node, const Point& value) {
  for (int k = 0; k < dim(); ++k) (*this)(node, k) = value[k];
}

bool VectorField::all_finite() const { return finite_range(values_); }

double VectorField::max_norm() const {
  double m = 0.0;
  for (std::size_t n = 0; n < node_count(); ++n) {
    if (!domain_->active(n)) continue;
    m = std::max(m, norm(at(n), dim()));
  }
  return m;
}

void apply_dirichlet(VectorField& field, const VectorFunction& datum) {
  const LatticeDomain& d = field.domain();
  for (std::size_t n = 0; n < d.node_count(); ++n)
    if (d.dirichlet(n)) field.set(n, datum(d.position(n)));
}

void apply_dirichlet(ScalarField& field, double value) {
  const LatticeDomain& d = field.domain();
  for (std::size_t n = 0; n < d.node_count(); ++n)
    if (d.dirichlet(n)) field[n] = value;
}

}  // namespace latfrac
