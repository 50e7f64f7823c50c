#include "latfrac/lattice.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <stdexcept>
#include <string>

namespace latfrac {

namespace {

// Relative slack used when comparing node coordinates with box faces.
constexpr double kGeomTol = 1e-9;

bool cell_meets_face(const Point& node, double delta, int dim, const Box& box,
                     const DirichletFace& face) {
  const double plane =
      face.side == Side::lower ? box.origin[face.axis] : box.origin[face.axis] + box.lengths[face.axis];
  const double tol = kGeomTol * delta;
  // Cell is [node, node + delta) along every axis.
  if (!(node[face.axis] <= plane + tol && plane < node[face.axis] + delta - tol)) return false;
  for (int j = 0; j < dim; ++j) {
    if (j == face.axis) continue;
    const double lo = std::max(face.lo[j], box.origin[j]);
    const double hi = std::min(face.hi[j], box.origin[j] + box.lengths[j]);
    if (!(node[j] <= hi + tol && node[j] + delta > lo + tol)) return false;
  }
  return true;
}

}  // namespace

DirichletSpec DirichletSpec::full_boundary(int dim) {
  DirichletSpec spec;
  for (int k = 0; k < dim; ++k) {
    spec.faces.push_back({.axis = k, .side = Side::lower});
    spec.faces.push_back({.axis = k, .side = Side::upper});
  }
  return spec;
}

DirichletSpec DirichletSpec::opposite_faces(int axis) {
  DirichletSpec spec;
  spec.faces.push_back({.axis = axis, .side = Side::lower});
  spec.faces.push_back({.axis = axis, .side = Side::upper});
  return spec;
}

std::size_t LatticeDomain::flat(const MultiIndex& index) const {
  std::size_t f = 0;
  for (int k = 0; k < dim_; ++k) f += index[k] * static_cast<std::size_t>(strides_[k]);
  return f;
}

MultiIndex LatticeDomain::multi(std::size_t node) const {
  MultiIndex index{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    const auto s = static_cast<std::size_t>(strides_[k]);
    index[k] = node / s;
    node %= s;
  }
  return index;
}

Point LatticeDomain::position(std::size_t node) const {
  const MultiIndex index = multi(node);
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k) p[k] = origin_[k] + spacing_ * static_cast<double>(index[k]);
  return p;
}

std::ptrdiff_t LatticeDomain::offset(const LatticeVector& xi) const {
  std::ptrdiff_t o = 0;
  for (int k = 0; k < dim_; ++k) o += static_cast<std::ptrdiff_t>(xi[k]) * strides_[k];
  return o;
}

bool LatticeDomain::in_grid(std::size_t node, const LatticeVector& xi) const {
  const MultiIndex index = multi(node);
  for (int k = 0; k < dim_; ++k) {
    const auto target = static_cast<std::ptrdiff_t>(index[k]) + xi[k];
    if (target < 0 || target >= static_cast<std::ptrdiff_t>(extents_[k])) return false;
  }
  for (int k = dim_; k < kMaxDim; ++k)
    if (xi[k] != 0) return false;
  return true;
}

bool LatticeDomain::same_geometry(const LatticeDomain& other) const {
  if (this == &other) return true;
  return dim_ == other.dim_ && spacing_ == other.spacing_ && origin_ == other.origin_ &&
         extents_ == other.extents_ && active_ == other.active_;
}

DomainPtr build_domain(const Box& box, double delta, const DirichletSpec& dirichlet,
                       const std::function<bool(const Point&)>& mask) {
  if (box.dim != 2 && box.dim != 3)
    throw std::invalid_argument("build_domain: dimension must be 2 or 3, got " +
                                std::to_string(box.dim));
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("build_domain: spacing must be positive and finite");
  for (int k = 0; k < box.dim; ++k) {
    if (!std::isfinite(box.lengths[k]) || box.lengths[k] < 2.0 * delta * (1.0 - kGeomTol))
      throw std::invalid_argument("build_domain: side " + std::to_string(k) +
                                  " is shorter than two lattice spacings");
  }
  if (dirichlet.extended && dirichlet.collar < 1)
    throw std::invalid_argument("build_domain: collar width must be at least 1");
  for (const auto& face : dirichlet.faces) {
    if (face.axis < 0 || face.axis >= box.dim)
      throw std::invalid_argument("build_domain: Dirichlet face axis out of range");
  }

  auto domain = std::shared_ptr<LatticeDomain>(new LatticeDomain());
  LatticeDomain& d = *domain;
  d.dim_ = box.dim;
  d.spacing_ = delta;
  d.box_ = box;

  std::array<std::size_t, kMaxDim> lower_collar{0, 0, 0};
  std::array<std::size_t, kMaxDim> upper_collar{0, 0, 0};
  if (dirichlet.extended) {
    for (const auto& face : dirichlet.faces) {
      auto& c = face.side == Side::lower ? lower_collar[face.axis] : upper_collar[face.axis];
      c = static_cast<std::size_t>(dirichlet.collar);
    }
  }

  std::array<std::size_t, kMaxDim> interior{1, 1, 1};
  for (int k = 0; k < box.dim; ++k) {
    interior[k] = static_cast<std::size_t>(std::floor(box.lengths[k] / delta + kGeomTol)) + 1;
    d.extents_[k] = interior[k] + lower_collar[k] + upper_collar[k];
    d.origin_[k] = box.origin[k] - delta * static_cast<double>(lower_collar[k]);
  }
  std::ptrdiff_t stride = 1;
  for (int k = box.dim - 1; k >= 0; --k) {
    d.strides_[k] = stride;
    stride *= static_cast<std::ptrdiff_t>(d.extents_[k]);
  }
  d.node_count_ = static_cast<std::size_t>(stride);
  d.active_.assign(d.node_count_, 0);
  d.dirichlet_.assign(d.node_count_, 0);
  d.collar_.assign(d.node_count_, 0);

  for (std::size_t n = 0; n < d.node_count_; ++n) {
    const MultiIndex index = d.multi(n);
    bool collar = false;
    for (int k = 0; k < box.dim; ++k) {
      if (index[k] < lower_collar[k] || index[k] >= lower_collar[k] + interior[k]) collar = true;
    }
    const Point p = d.position(n);
    if (collar) {
      // Collar nodes belong to the enlarged domain and carry the datum.
      d.collar_[n] = 1;
      d.active_[n] = 1;
      d.dirichlet_[n] = 1;
      continue;
    }
    const bool inside = !mask || mask(p);
    d.active_[n] = inside ? 1 : 0;
    if (!inside) continue;
    for (const auto& face : dirichlet.faces) {
      if (cell_meets_face(p, delta, box.dim, box, face)) {
        d.dirichlet_[n] = 1;
        break;
      }
    }
  }
  d.active_count_ = static_cast<std::size_t>(std::count(d.active_.begin(), d.active_.end(), 1));
  if (d.active_count_ == 0) throw std::invalid_argument("build_domain: active set is empty");
  return domain;
}

double DirectionSet::weight(const LatticeVector& xi) const {
  switch (squared_length(xi)) {
    case 1: return sigma_1;
    case 2: return sigma_sqrt2;
    case 3: return sigma_sqrt3;
    default: throw std::invalid_argument("DirectionSet::weight: vector not in the direction set");
  }
}

DirectionSet DirectionSet::with_weights(double s1, double s2, double s3) const {
  if (!(s1 > 0.0) || !(s2 > 0.0) || (dim == 3 && !(s3 > 0.0)))
    throw std::invalid_argument("DirectionSet: kernel weights must be positive");
  DirectionSet copy = *this;
  copy.sigma_1 = s1;
  copy.sigma_sqrt2 = s2;
  copy.sigma_sqrt3 = dim == 3 ? s3 : 0.0;
  return copy;
}

DirectionSet direction_set(int dim) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("direction_set: dimension must be 2 or 3, got " +
                                std::to_string(dim));
  DirectionSet set;
  set.dim = dim;
  for (int i = 0; i < dim; ++i) set.vectors.push_back(unit_vector(i));
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      LatticeVector plus{0, 0, 0}, minus{0, 0, 0};
      plus[i] = 1, plus[j] = 1;
      minus[i] = 1, minus[j] = -1;
      set.vectors.push_back(plus);
      set.vectors.push_back(minus);
    }
  }
  if (dim == 3) {
    for (int s2 : {1, -1})
      for (int s3 : {1, -1}) set.vectors.push_back({1, s2, s3});
    set.sigma_1 = 0.75;
    set.sigma_sqrt2 = 0.5;
    set.sigma_sqrt3 = 9.0 / 16.0;
  } else {
    set.sigma_1 = 1.0;
    set.sigma_sqrt2 = 1.0;
    set.sigma_sqrt3 = 0.0;
  }
  return set;
}

std::vector<std::size_t> range_nodes(const LatticeDomain& domain, const LatticeVector& xi,
                                     const NodeMask* subset) {
  if (is_zero(xi)) throw std::invalid_argument("range_nodes: direction must be nonzero");
  for (int k = domain.dim(); k < kMaxDim; ++k)
    if (xi[k] != 0) throw std::invalid_argument("range_nodes: direction exceeds dimension");
  if (subset && subset->size() != domain.node_count())
    throw std::invalid_argument("range_nodes: subset size mismatch");

  const int g = lattice_gcd(xi);
  LatticeVector step{xi[0] / g, xi[1] / g, xi[2] / g};
  const LatticeVector far_minus = negate(xi);
  const std::ptrdiff_t step_offset = domain.offset(step);

  auto member = [&](std::size_t n) {
    return domain.active(n) && (subset == nullptr || (*subset)[n] != 0);
  };

  std::vector<std::size_t> nodes;
  for (std::size_t n = 0; n < domain.node_count(); ++n) {
    if (!member(n)) continue;
    if (!domain.in_grid(n, xi) || !domain.in_grid(n, far_minus)) continue;
    bool ok = true;
    auto p = static_cast<std::ptrdiff_t>(domain.shifted(n, far_minus));
    for (int k = 0; k <= 2 * g && ok; ++k, p += step_offset)
      ok = member(static_cast<std::size_t>(p));
    if (ok) nodes.push_back(n);
  }
  return nodes;
}

std::vector<std::size_t> range_div(const LatticeDomain& domain, const NodeMask* subset) {
  std::vector<std::size_t> result = range_nodes(domain, unit_vector(0), subset);
  for (int k = 1; k < domain.dim(); ++k) {
    const auto other = range_nodes(domain, unit_vector(k), subset);
    std::vector<std::size_t> merged;
    std::set_intersection(result.begin(), result.end(), other.begin(), other.end(),
                          std::back_inserter(merged));
    result = std::move(merged);
  }
  return result;
}

}  // namespace latfrac
