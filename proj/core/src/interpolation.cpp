#include "latfrac/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latfrac {

namespace {

constexpr double kLocateTol = 1e-12;

long long det_int(const std::vector<LatticeVector>& rows, int dim) {
  if (dim == 2) return static_cast<long long>(rows[0][0]) * rows[1][1] -
                       static_cast<long long>(rows[0][1]) * rows[1][0];
  const auto& a = rows[0];
  const auto& b = rows[1];
  const auto& c = rows[2];
  return static_cast<long long>(a[0]) * (b[1] * c[2] - b[2] * c[1]) -
         static_cast<long long>(a[1]) * (b[0] * c[2] - b[2] * c[0]) +
         static_cast<long long>(a[2]) * (b[0] * c[1] - b[1] * c[0]);
}

const std::vector<Simplex>& cached_freudenthal(int dim) {
  static const std::vector<Simplex> two = freudenthal(2);
  static const std::vector<Simplex> three = freudenthal(3);
  return dim == 2 ? two : three;
}

bool in_unit_interval(double y) { return y >= 0.0 && y < 1.0; }

void require_cell_shift(const Point& y, int dim) {
  for (int k = 0; k < dim; ++k)
    if (!in_unit_interval(y[k])) throw std::invalid_argument("translate: y must lie in [0,1)^d");
}

}  // namespace

long long Simplex::volume_times_factorial() const {
  std::vector<LatticeVector> rows;
  for (int k = 1; k <= dim; ++k) rows.push_back(vertices[static_cast<std::size_t>(k)]);
  return std::llabs(det_int(rows, dim));
}

bool Simplex::contains(const Point& t, double tol) const {
  // t lies in the chain simplex iff 1 >= t_{p_1} >= t_{p_2} >= ... >= t_{p_d} >= 0.
  if (t[order[0]] > 1.0 + tol) return false;
  for (int k = 1; k < dim; ++k)
    if (t[order[k]] > t[order[k - 1]] + tol) return false;
  return t[order[dim - 1]] >= -tol;
}

std::array<double, kMaxDim + 1> Simplex::barycentric(const Point& t) const {
  std::array<double, kMaxDim + 1> b{};
  b[0] = 1.0 - t[order[0]];
  for (int k = 1; k < dim; ++k) b[k] = t[order[k - 1]] - t[order[k]];
  b[dim] = t[order[dim - 1]];
  return b;
}

std::vector<Simplex> freudenthal(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("freudenthal: dimension must be 2 or 3");
  std::array<int, kMaxDim> perm{0, 1, 2};
  std::vector<Simplex> out;
  do {
    Simplex s;
    s.dim = dim;
    s.order = perm;
    LatticeVector v{0, 0, 0};
    s.vertices.push_back(v);
    for (int k = 0; k < dim; ++k) {
      v[perm[k]] = 1;
      s.vertices.push_back(v);
    }
    for (std::size_t i = 0; i < s.vertices.size(); ++i)
      for (std::size_t j = i + 1; j < s.vertices.size(); ++j) {
        LatticeVector e{};
        for (int k = 0; k < kMaxDim; ++k) e[k] = s.vertices[j][k] - s.vertices[i][k];
        s.edges.push_back(e);
      }
    out.push_back(std::move(s));
  } while (std::next_permutation(perm.begin(), perm.begin() + dim));
  return out;
}

std::size_t locate_simplex(int dim, const Point& t) {
  const auto& simplices = cached_freudenthal(dim);
  for (int k = 0; k < dim; ++k)
    if (t[k] < -kLocateTol || t[k] > 1.0 + kLocateTol)
      throw std::out_of_range("locate_simplex: point outside the unit cube");
  for (std::size_t i = 0; i < simplices.size(); ++i)
    if (simplices[i].contains(t, kLocateTol)) return i;
  throw std::out_of_range("locate_simplex: point not covered");
}

PiecewiseAffine::PiecewiseAffine(const ScalarField& field)
    : domain_(field.domain_ptr()),
      comps_(1),
      values_(field.values().begin(), field.values().end()),
      simplices_(freudenthal(field.domain().dim())) {}

PiecewiseAffine::PiecewiseAffine(const VectorField& field)
    : domain_(field.domain_ptr()),
      comps_(field.dim()),
      values_(field.values().begin(), field.values().end()),
      simplices_(freudenthal(field.dim())) {}

PiecewiseAffine::Location PiecewiseAffine::locate(const Point& x) const {
  const LatticeDomain& d = *domain_;
  const double h = d.spacing();
  Location loc;
  MultiIndex cell{0, 0, 0};
  for (int k = 0; k < d.dim(); ++k) {
    const double s = (x[k] - d.origin()[k]) / h;
    const double top = static_cast<double>(d.extents()[k] - 1);
    if (s < -kLocateTol || s > top + kLocateTol)
      throw std::out_of_range("PiecewiseAffine: query outside the lattice");
    double c = std::floor(s);
    c = std::clamp(c, 0.0, top - 1.0);
    cell[k] = static_cast<std::size_t>(c);
    loc.local[k] = std::clamp(s - c, 0.0, 1.0);
  }
  loc.base = d.flat(cell);
  loc.simplex = locate_simplex(d.dim(), loc.local);
  for (const auto& v : simplices_[loc.simplex].vertices)
    if (!d.active(d.shifted(loc.base, v)))
      throw std::out_of_range("PiecewiseAffine: query outside the triangulated region");
  return loc;
}

double PiecewiseAffine::value(const Point& x, int comp) const {
  if (comp < 0 || comp >= comps_) throw std::out_of_range("PiecewiseAffine: component");
  const Location loc = locate(x);
  const Simplex& s = simplices_[loc.simplex];
  const auto bary = s.barycentric(loc.local);
  double out = 0.0;
  for (int k = 0; k <= s.dim; ++k)
    out += bary[k] * nodal(domain_->shifted(loc.base, s.vertices[static_cast<std::size_t>(k)]), comp);
  return out;
}

Point PiecewiseAffine::vector_value(const Point& x) const {
  Point p{0.0, 0.0, 0.0};
  for (int c = 0; c < comps_; ++c) p[c] = value(x, c);
  return p;
}

Matrix PiecewiseAffine::jacobian(const Point& x) const {
  const Location loc = locate(x);
  const Simplex& s = simplices_[loc.simplex];
  const double h = domain_->spacing();
  Matrix j{};
  // Along the chain the interpolant changes by u(s_k) - u(s_{k-1}) over delta e_{p_k}.
  for (int k = 1; k <= s.dim; ++k) {
    const std::size_t hi = domain_->shifted(loc.base, s.vertices[static_cast<std::size_t>(k)]);
    const std::size_t lo = domain_->shifted(loc.base, s.vertices[static_cast<std::size_t>(k - 1)]);
    for (int c = 0; c < comps_; ++c) j[c][s.order[k - 1]] = (nodal(hi, c) - nodal(lo, c)) / h;
  }
  return j;
}

CellField vmin_cell(const ScalarField& v) {
  const LatticeDomain& d = v.domain();
  CellField out;
  out.domain = v.domain_ptr();
  out.values.assign(d.node_count(), 0.0);
  out.valid.assign(d.node_count(), 0);
  const std::size_t corners = std::size_t{1} << d.dim();
  for (std::size_t n = 0; n < d.node_count(); ++n) {
    const MultiIndex idx = d.multi(n);
    bool interior = true;
    for (int k = 0; k < d.dim(); ++k) interior = interior && idx[k] + 1 < d.extents()[k];
    if (!interior) continue;
    double m = v[n];
    bool complete = true;
    for (std::size_t c = 0; c < corners; ++c) {
      LatticeVector off{0, 0, 0};
      for (int k = 0; k < d.dim(); ++k) off[k] = static_cast<int>((c >> k) & 1U);
      const std::size_t corner = d.shifted(n, off);
      if (!d.active(corner)) {
        complete = false;
        break;
      }
      m = std::min(m, v[corner]);
    }
    if (!complete) {
      ++out.skipped;
      continue;
    }
    out.values[n] = m;
    out.valid[n] = 1;
  }
  return out;
}

ScalarField translate(const ScalarField& field, const Point& y) {
  require_cell_shift(y, field.domain().dim());
  return field;
}

VectorField translate(const VectorField& field, const Point& y) {
  require_cell_shift(y, field.dim());
  return field;
}

ScalarField sample_translated(const DomainPtr& domain, const ScalarFunction& f, const Point& y) {
  const double h = domain->spacing();
  return ScalarField::sample(domain, [&](const Point& x) {
    Point p = x;
    for (int k = 0; k < domain->dim(); ++k) p[k] += h * y[k];
    return f(p);
  });
}

VectorField sample_translated(const DomainPtr& domain, const VectorFunction& f, const Point& y) {
  const double h = domain->spacing();
  return VectorField::sample(domain, [&](const Point& x) {
    Point p = x;
    for (int k = 0; k < domain->dim(); ++k) p[k] += h * y[k];
    return f(p);
  });
}

HatInterpolant1D::HatInterpolant1D(std::vector<double> samples, double delta, double origin)
    : samples_(std::move(samples)), delta_(delta), origin_(origin) {
  if (samples_.size() < 2) throw std::invalid_argument("pc_to_affine_1d: need at least two samples");
  if (!(delta_ > 0.0)) throw std::invalid_argument("pc_to_affine_1d: delta must be positive");
}

std::size_t HatInterpolant1D::segment(double t) const {
  const double s = (t - origin_) / delta_;
  const double top = static_cast<double>(samples_.size() - 1);
  if (s < -kLocateTol || s > top + kLocateTol)
    throw std::out_of_range("HatInterpolant1D: query outside the partition");
  return static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, top - 1.0));
}

double HatInterpolant1D::operator()(double t) const {
  const std::size_t i = segment(t);
  const double w = std::clamp((t - origin_) / delta_ - static_cast<double>(i), 0.0, 1.0);
  return (1.0 - w) * samples_[i] + w * samples_[i + 1];
}

double HatInterpolant1D::slope(double t) const {
  const std::size_t i = segment(t);
  return (samples_[i + 1] - samples_[i]) / delta_;
}

HatInterpolant1D pc_to_affine_1d(std::vector<double> samples, double delta, double origin) {
  return HatInterpolant1D(std::move(samples), delta, origin);
}

}  // namespace latfrac
