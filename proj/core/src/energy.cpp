#include "latfrac/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latfrac/operators.hpp"

namespace latfrac {

namespace {

double lattice_weight(const LatticeDomain& d) { return std::pow(d.spacing(), d.dim() - 2); }

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::dirichlet: return "dirichlet";
    case Variant::ni: return "ni";
  }
  return "plain";
}

Variant parse_variant(const std::string& name) {
  if (name == "plain") return Variant::plain;
  if (name == "dirichlet") return Variant::dirichlet;
  if (name == "ni") return Variant::ni;
  throw std::invalid_argument("unknown energy variant '" + name + "'");
}

void EnergyParams::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument(std::string("EnergyParams: ") + name + " must be positive");
  };
  positive(lambda, "lambda");
  positive(theta, "theta");
  positive(eps, "eps");
  positive(delta, "delta");
  if (max_displacement) {
    if (!(*max_displacement >= 0.0) || !std::isfinite(*max_displacement))
      throw std::invalid_argument("EnergyParams: M must be nonnegative");
  } else if (variant == Variant::ni) {
    throw std::invalid_argument("EnergyParams: variant ni requires M");
  }
}

DirectionSet EnergyParams::directions(int dim) const {
  if (sigma) {
    if (sigma->dim != dim) throw std::invalid_argument("EnergyParams: sigma dimension mismatch");
    return *sigma;
  }
  return direction_set(dim);
}

nlohmann::json to_json(const EnergyBreakdown& b) {
  nlohmann::json j;
  j["f_elastic_raw"] = b.f_elastic_raw;
  j["f_div_raw"] = b.f_div_raw;
  j["g_mm"] = b.g_mm;
  j["lambda"] = b.lambda;
  j["theta"] = b.theta;
  if (b.total)
    j["total"] = *b.total;
  else
    j["total"] = "inf";
  j["admissible"] = b.admissible();
  return j;
}

double elastic_direction_energy(const VectorField& u, const ScalarField& v,
                                const LatticeVector& xi, const NodeMask* subset,
                                const ExecPolicy& policy) {
  require_same_domain(u.domain(), v.domain(), "elastic_direction_energy");
  const auto nodes = range_nodes(u.domain(), xi, subset);
  const double sum = reduce_sum(nodes.size(), policy, [&](std::size_t i) {
    const std::size_t a = nodes[i];
    return v[a] * v[a] * sym_pair_sq(u, a, xi);
  });
  return 0.5 * lattice_weight(u.domain()) * sum;
}

double elastic_energy(const VectorField& u, const ScalarField& v, const DirectionSet& sigma,
                      const NodeMask* subset, const ExecPolicy& policy) {
  if (sigma.dim != u.dim()) throw std::invalid_argument("elastic_energy: direction set dimension");
  double total = 0.0;
  for (const auto& xi : sigma.vectors)
    total += sigma.weight(xi) * elastic_direction_energy(u, v, xi, subset, policy);
  return total;
}

double divergence_energy(const VectorField& u, const ScalarField& v, const NodeMask* subset,
                         const ExecPolicy& policy) {
  require_same_domain(u.domain(), v.domain(), "divergence_energy");
  const auto nodes = range_div(u.domain(), subset);
  const double sum = reduce_sum(nodes.size(), policy, [&](std::size_t i) {
    const std::size_t a = nodes[i];
    return v[a] * v[a] * div_sq_total(u, a);
  });
  return lattice_weight(u.domain()) * sum / static_cast<double>(1 << u.dim());
}

double divergence_energy_positive(const VectorField& u, const ScalarField& v,
                                  const ExecPolicy& policy) {
  require_same_domain(u.domain(), v.domain(), "divergence_energy_positive");
  const auto nodes = range_div(u.domain());
  const double sum = reduce_sum(nodes.size(), policy, [&](std::size_t i) {
    const std::size_t a = nodes[i];
    return v[a] * v[a] * div_pm_sq(u, a, DivergencePart::positive);
  });
  return lattice_weight(u.domain()) * sum / static_cast<double>(1 << u.dim());
}

double divergence_energy_negative(const VectorField& u, const ExecPolicy& policy) {
  const auto nodes = range_div(u.domain());
  const double sum = reduce_sum(nodes.size(), policy, [&](std::size_t i) {
    return div_pm_sq(u, nodes[i], DivergencePart::negative);
  });
  return lattice_weight(u.domain()) * sum / static_cast<double>(1 << u.dim());
}

double divergence_energy_ni(const VectorField& u, const ScalarField& v, const ExecPolicy& policy) {
  return divergence_energy_positive(u, v, policy) + divergence_energy_negative(u, policy);
}

double phase_field_energy(const ScalarField& v, double eps, const NodeMask* subset,
                          const ExecPolicy& policy) {
  if (!(eps > 0.0)) throw std::invalid_argument("phase_field_energy: eps must be positive");
  const LatticeDomain& d = v.domain();
  if (subset && subset->size() != d.node_count())
    throw std::invalid_argument("phase_field_energy: subset size mismatch");
  const double delta = d.spacing();
  auto member = [&](std::size_t n) {
    return d.active(n) && (subset == nullptr || (*subset)[n] != 0);
  };
  const double sum = reduce_sum(d.node_count(), policy, [&](std::size_t n) {
    if (!member(n)) return 0.0;
    const double dv = v[n] - 1.0;
    double term = dv * dv / eps;
    double grad = 0.0;
    const MultiIndex index = d.multi(n);
    for (int k = 0; k < d.dim(); ++k) {
      if (index[k] + 1 >= d.extents()[k]) continue;
      const std::size_t next = d.shifted(n, unit_vector(k));
      if (!member(next)) continue;
      const double q = (v[next] - v[n]) / delta;
      grad += q * q;
    }
    term += eps * grad;
    return term;
  });
  return 0.5 * std::pow(delta, d.dim()) * sum;
}

EnergyBreakdown total_energy(const VectorField& u, const ScalarField& v, const EnergyParams& params,
                             const VectorFunction* datum, const ExecPolicy& policy) {
  params.validate();
  require_same_domain(u.domain(), v.domain(), "total_energy");
  const LatticeDomain& d = u.domain();

  EnergyBreakdown b;
  b.lambda = params.lambda;
  b.theta = params.theta;
  b.f_elastic_raw = elastic_energy(u, v, params.directions(d.dim()), nullptr, policy);
  b.f_div_raw = params.variant == Variant::ni ? divergence_energy_ni(u, v, policy)
                                               : divergence_energy(u, v, nullptr, policy);
  b.g_mm = phase_field_energy(v, params.eps, nullptr, policy);

  bool admissible = true;
  if (params.variant == Variant::dirichlet) {
    if (datum == nullptr)
      throw std::invalid_argument("total_energy: Dirichlet variant needs a boundary datum");
    for (std::size_t n = 0; n < d.node_count() && admissible; ++n) {
      if (!d.dirichlet(n)) continue;
      const Point target = (*datum)(d.position(n));
      for (int k = 0; k < d.dim(); ++k)
        if (u(n, k) != target[k]) admissible = false;
      if (v[n] != 1.0) admissible = false;
    }
  } else if (params.variant == Variant::ni) {
    admissible = u.max_norm() <= *params.max_displacement;
  }
  if (admissible) b.total = b.f_elastic() + b.f_div() + b.g_mm;
  return b;
}

LatticeCoefficients lattice_coefficients(const DirectionSet& sigma) {
  const double d = sigma.dim;
  LatticeCoefficients c;
  c.c1 = sigma.sigma_1 + 0.5 * sigma.sigma_sqrt2 * (d - 2.0);
  // The four body diagonals e_1 +- e_2 +- e_3 contribute 4 s3/9 (tr M)^2 + 16 s3/9 sum_{i<j} M_ij^2.
  c.c2 = sigma.sigma_sqrt2 + 4.0 * sigma.sigma_sqrt3 / 9.0 * (d - 1.0) * (d - 2.0);
  c.c3 = 0.5 * sigma.sigma_sqrt2 + 2.0 * sigma.sigma_sqrt3 / 9.0 * (d - 1.0) * (d - 2.0);
  return c;
}

QuadraticFormValues quadratic_form_identity(const Matrix& m, const DirectionSet& sigma) {
  const int dim = sigma.dim;
  double scale = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) scale = std::max(scale, std::abs(m[i][j]));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (std::abs(m[i][j] - m[j][i]) > 1e-14 * scale)
        throw std::invalid_argument("quadratic_form_identity: matrix is not symmetric");

  QuadraticFormValues out;
  for (const auto& xi : sigma.vectors) {
    const Point x = to_point(xi);
    double form = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) form += m[i][j] * x[i] * x[j];
    const double len_sq = squared_length(xi);
    out.lhs += sigma.weight(xi) / (len_sq * len_sq) * form * form;
  }

  const LatticeCoefficients c = lattice_coefficients(sigma);
  double diag = 0.0, off = 0.0;
  for (int i = 0; i < dim; ++i) {
    diag += m[i][i] * m[i][i];
    for (int j = i + 1; j < dim; ++j) off += m[i][j] * m[i][j];
  }
  const double tr = trace(m, dim);
  out.rhs = c.c1 * diag + 2.0 * c.c2 * off + c.c3 * tr * tr;
  return out;
}

}  // namespace latfrac
