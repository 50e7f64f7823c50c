#include "latfrac/griffith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latfrac/quadrature.hpp"

namespace latfrac {

namespace {

Matrix finite_difference_jacobian(const VectorFunction& f, const Point& x, int dim) {
  Matrix j{};
  for (int c = 0; c < dim; ++c) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[c]));
    Point xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const Point fp = f(xp);
    const Point fm = f(xm);
    for (int r = 0; r < dim; ++r) j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
  }
  return j;
}

bool contains_closed(const Box& b, const Point& x) {
  for (int k = 0; k < b.dim; ++k) {
    const double tol = 1e-12 * std::max(1.0, b.lengths[k]);
    if (x[k] < b.origin[k] - tol || x[k] > b.origin[k] + b.lengths[k] + tol) return false;
  }
  return true;
}

}  // namespace

double CrackGeometry::measure(const Box& omega) const {
  const int tangential = omega.dim - 1;
  double m = 1.0;
  for (int k = 0; k < tangential; ++k) {
    if (full_line) {
      m *= omega.lengths[k];
      continue;
    }
    const double lo = std::max(lower[k], omega.origin[k]);
    const double hi = std::min(upper[k], omega.origin[k] + omega.lengths[k]);
    m *= std::max(0.0, hi - lo);
  }
  return m;
}

double CrackGeometry::tangential_distance(const Point& x, const Box& omega) const {
  if (full_line) return 0.0;
  double s = 0.0;
  for (int k = 0; k < omega.dim - 1; ++k) {
    const double gap = std::max({lower[k] - x[k], 0.0, x[k] - upper[k]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

Point GriffithReference::displacement(const Point& x) const {
  for (const auto& r : regions)
    if (contains_closed(r.box, x)) return r.displacement(x);
  throw std::out_of_range("GriffithReference: point outside every region");
}

GriffithReference GriffithReference::affine(const Box& omega, const Matrix& a, const Point& b) {
  GriffithReference ref;
  ref.omega = omega;
  const int dim = omega.dim;
  SmoothRegion region;
  region.box = omega;
  region.displacement = [a, b, dim](const Point& x) {
    Point y{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
      y[i] = b[i];
      for (int j = 0; j < dim; ++j) y[i] += a[i][j] * x[j];
    }
    return y;
  };
  region.jacobian = [a](const Point&) { return a; };
  ref.regions.push_back(std::move(region));
  return ref;
}

GriffithReference GriffithReference::planar_jump(const Box& omega, double offset,
                                                 const Point& jump) {
  const int axis = omega.dim - 1;
  if (!(offset > omega.origin[axis] && offset < omega.origin[axis] + omega.lengths[axis]))
    throw std::invalid_argument("planar_jump: crack plane must cut the box");
  GriffithReference ref;
  ref.omega = omega;
  SmoothRegion below, above;
  below.box = omega;
  below.box.lengths[axis] = offset - omega.origin[axis];
  above.box = omega;
  above.box.origin[axis] = offset;
  above.box.lengths[axis] = omega.origin[axis] + omega.lengths[axis] - offset;
  // Points on the plane itself resolve to the lower region.
  below.displacement = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
  above.displacement = [jump](const Point&) { return jump; };
  below.jacobian = above.jacobian = [](const Point&) { return Matrix{}; };
  ref.regions = {std::move(below), std::move(above)};
  CrackGeometry crack;
  crack.offset = offset;
  crack.full_line = true;
  ref.crack = crack;
  return ref;
}

GriffithValue griffith_energy(const GriffithReference& ref, double lambda, double theta,
                              const QuadratureOptions& options) {
  if (options.order < 4) throw std::invalid_argument("griffith_energy: quadrature order must be >= 4");
  if (options.subdivisions < 1) throw std::invalid_argument("griffith_energy: subdivisions must be >= 1");
  const int dim = ref.omega.dim;
  const GaussRule rule = gauss_legendre(options.order);
  const int q = options.order;
  const int s = options.subdivisions;

  GriffithValue value;
  for (const auto& region : ref.regions) {
    const Box& b = region.box;
    Point h{};
    double cell_volume = 1.0;
    for (int k = 0; k < dim; ++k) {
      h[k] = b.lengths[k] / s;
      cell_volume *= h[k];
    }
    const int cells = dim == 2 ? s * s : s * s * s;
    const int points = dim == 2 ? q * q : q * q * q;
    for (int c = 0; c < cells; ++c) {
      std::array<int, kMaxDim> ci{c / s % s, c % s, 0};
      if (dim == 3) ci = {c / (s * s), c / s % s, c % s};
      for (int p = 0; p < points; ++p) {
        std::array<int, kMaxDim> pi{p / q % q, p % q, 0};
        if (dim == 3) pi = {p / (q * q), p / q % q, p % q};
        Point x{0.0, 0.0, 0.0};
        double w = cell_volume;
        for (int k = 0; k < dim; ++k) {
          const auto idx = static_cast<std::size_t>(pi[k]);
          x[k] = b.origin[k] + h[k] * (ci[k] + 0.5 * (1.0 + rule.nodes[idx]));
          w *= 0.5 * rule.weights[idx];
        }
        const Matrix grad = region.jacobian ? region.jacobian(x)
                                            : finite_difference_jacobian(region.displacement, x, dim);
        const Matrix strain = symmetric_part(grad, dim);
        const double e2 = frobenius_sq(strain, dim);
        const double div = trace(grad, dim);
        if (!std::isfinite(e2) || !std::isfinite(div))
          throw std::runtime_error("griffith_energy: non-finite integrand");
        value.elastic += w * e2;
        value.divergence += w * div * div;
      }
    }
  }
  value.surface = ref.dirichlet_mismatch + (ref.crack ? ref.crack->measure(ref.omega) : 0.0);
  value.total = lambda * value.elastic + (0.5 * lambda + theta) * value.divergence + value.surface;
  return value;
}

}  // namespace latfrac
