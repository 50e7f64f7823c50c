#include "latfrac/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "latfrac/cg.hpp"
#include "latfrac/operators.hpp"

namespace latfrac {

namespace {

double lattice_weight(const LatticeDomain& d) { return std::pow(d.spacing(), d.dim() - 2); }

double total_or_inf(const EnergyBreakdown& e) {
  return e.total.value_or(std::numeric_limits<double>::infinity());
}

/// Per-component mask of the displacement unknowns.
std::vector<std::uint8_t> free_entries(const LatticeDomain& d, bool pinned) {
  const auto dim = static_cast<std::size_t>(d.dim());
  std::vector<std::uint8_t> mask(d.node_count() * dim, 0);
  for (std::size_t n = 0; n < d.node_count(); ++n) {
    if (!d.active(n) || (pinned && d.dirichlet(n))) continue;
    for (std::size_t c = 0; c < dim; ++c) mask[n * dim + c] = 1;
  }
  return mask;
}

bool has_dirichlet_nodes(const LatticeDomain& d) {
  return std::any_of(d.dirichlet_mask().begin(), d.dirichlet_mask().end(),
                     [](std::uint8_t x) { return x != 0; });
}

void require_datum(const EnergyParams& params, const VectorFunction* datum, const char* where) {
  if (params.variant == Variant::dirichlet && datum == nullptr)
    throw std::invalid_argument(std::string(where) + ": Dirichlet variant needs a boundary datum");
}

/// Hessian of lambda F(., v) (+ theta F_div(., v)) as a matrix-free operator.
///
/// Every summand is c * l(u)^2 with a linear stencil l, so the Hessian is
/// 2 sum c grad(l) grad(l)^T and the gradient at u is the Hessian applied to u.
class DisplacementOperator {
 public:
  DisplacementOperator(const ScalarField& v, const EnergyParams& params, bool with_divergence)
      : domain_(v.domain()), dim_(v.domain().dim()) {
    const DirectionSet sigma = params.directions(dim_);
    const double w = lattice_weight(domain_);
    for (const auto& xi : sigma.vectors) {
      Direction dir;
      dir.xi = xi;
      dir.nodes = range_nodes(domain_, xi);
      const double scale = 0.5 * params.lambda * sigma.weight(xi) * w;
      dir.coeff.reserve(dir.nodes.size());
      for (std::size_t a : dir.nodes) dir.coeff.push_back(scale * v[a] * v[a]);
      directions_.push_back(std::move(dir));
    }
    if (with_divergence) {
      div_nodes_ = range_div(domain_);
      const double scale = params.theta * w / static_cast<double>(1 << dim_);
      for (std::size_t a : div_nodes_) div_coeff_.push_back(scale * v[a] * v[a]);
    }
  }

  void apply(std::span<const double> in, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const auto dim = static_cast<std::size_t>(dim_);
    for (const auto& dir : directions_) {
      for (int sign : {1, -1}) {
        const LatticeVector s = sign > 0 ? dir.xi : negate(dir.xi);
        const double inv = 1.0 / static_cast<double>(squared_length(s));
        const std::ptrdiff_t off = domain_.offset(s);
        for (std::size_t i = 0; i < dir.nodes.size(); ++i) {
          const std::size_t a = dir.nodes[i];
          const std::size_t b = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(a) + off);
          double l = 0.0;
          for (std::size_t k = 0; k < dim; ++k) l += (in[b * dim + k] - in[a * dim + k]) * s[k];
          l *= inv;
          const double f = 2.0 * dir.coeff[i] * l * inv;
          for (std::size_t k = 0; k < dim; ++k) {
            out[b * dim + k] += f * s[k];
            out[a * dim + k] -= f * s[k];
          }
        }
      }
    }
    if (div_nodes_.empty()) return;
    for (const auto& pattern : sign_patterns(dim_)) {
      std::array<std::ptrdiff_t, kMaxDim> off{};
      for (int k = 0; k < dim_; ++k) {
        LatticeVector e{0, 0, 0};
        e[k] = pattern.k[k];
        off[k] = domain_.offset(e);
      }
      for (std::size_t i = 0; i < div_nodes_.size(); ++i) {
        const std::size_t a = div_nodes_[i];
        double l = 0.0;
        for (int k = 0; k < dim_; ++k) {
          const auto b = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(a) + off[k]);
          l += pattern.k[k] * (in[b * dim + k] - in[a * dim + k]);
        }
        const double f = 2.0 * div_coeff_[i] * l;
        for (int k = 0; k < dim_; ++k) {
          const auto b = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(a) + off[k]);
          out[b * dim + k] += f * pattern.k[k];
          out[a * dim + k] -= f * pattern.k[k];
        }
      }
    }
  }

 private:
  struct Direction {
    LatticeVector xi{};
    std::vector<std::size_t> nodes;
    std::vector<double> coeff;
  };
  const LatticeDomain& domain_;
  int dim_;
  std::vector<Direction> directions_;
  std::vector<std::size_t> div_nodes_;
  std::vector<double> div_coeff_;
};

/// Adds the gradient of theta F_div_ni(u, v) to `out`.
void add_ni_divergence_gradient(const VectorField& u, const ScalarField& v,
                                const EnergyParams& params, std::span<double> out) {
  const LatticeDomain& d = u.domain();
  const int dim = d.dim();
  const auto stride = static_cast<std::size_t>(dim);
  const double scale = params.theta * lattice_weight(d) / static_cast<double>(1 << dim);
  const auto nodes = range_div(d);
  for (const auto& pattern : sign_patterns(dim)) {
    for (std::size_t a : nodes) {
      const double g = div_directed(u, a, pattern);
      // d/dg of v^2 (g+)^2 + (g-)^2
      const double f = 2.0 * scale * (v[a] * v[a] * positive_part(g) - negative_part(g));
      if (f == 0.0) continue;
      for (int k = 0; k < dim; ++k) {
        LatticeVector e{0, 0, 0};
        e[k] = pattern.k[k];
        const std::size_t b = d.shifted(a, e);
        out[b * stride + static_cast<std::size_t>(k)] += f * pattern.k[k];
        out[a * stride + static_cast<std::size_t>(k)] -= f * pattern.k[k];
      }
    }
  }
}

double ni_objective(const VectorField& u, const ScalarField& v, const EnergyParams& params,
                    const ExecPolicy& policy) {
  return params.lambda * elastic_energy(u, v, params.directions(u.dim()), nullptr, policy) +
         params.theta * divergence_energy_ni(u, v, policy);
}

/// Scales u(alpha) onto the closed ball of radius M, guaranteeing |u(alpha)| <= M in floating point.
void project_node(std::span<double> u, std::size_t node, int dim, double bound) {
  const auto base = node * static_cast<std::size_t>(dim);
  auto length = [&] {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) s += u[base + static_cast<std::size_t>(k)] * u[base + static_cast<std::size_t>(k)];
    return std::sqrt(s);
  };
  const double n = length();
  if (n <= bound) return;
  if (bound == 0.0) {
    for (int k = 0; k < dim; ++k) u[base + static_cast<std::size_t>(k)] = 0.0;
    return;
  }
  double scale = bound / n;
  for (int k = 0; k < dim; ++k) u[base + static_cast<std::size_t>(k)] *= scale;
  while (length() > bound) {
    scale = 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    for (int k = 0; k < dim; ++k) u[base + static_cast<std::size_t>(k)] *= scale;
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(outer_tolerance > 0.0) || !(cg_tolerance > 0.0) || !(ni_tolerance > 0.0))
    throw std::invalid_argument("SolverConfig: tolerances must be positive");
  if (max_outer_iterations < 1 || cg_max_iterations < 1 || ni_max_iterations < 1 || max_backtracks < 1)
    throw std::invalid_argument("SolverConfig: iteration caps must be at least 1");
  if (!(armijo > 0.0 && armijo < 1.0)) throw std::invalid_argument("SolverConfig: armijo must lie in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("SolverConfig: backtrack must lie in (0,1)");
}

nlohmann::json to_json(const SolveReport& report) {
  nlohmann::json j;
  j["converged"] = report.converged;
  j["outer_iterations"] = report.outer_iterations;
  j["cg_iterations"] = report.cg_iterations;
  j["ni_iterations"] = report.ni_iterations;
  j["max_clamp_correction"] = report.max_clamp_correction;
  j["wall_seconds"] = report.wall_seconds;
  j["trace"] = nlohmann::json::array();
  for (const auto& e : report.trace) j["trace"].push_back(to_json(e));
  j["substep_totals"] = report.substep_totals;
  return j;
}

VectorField minimize_u(const VectorField& u_init, const ScalarField& v, const EnergyParams& params,
                       const SolverConfig& config, const VectorFunction* datum, SubstepInfo* info) {
  params.validate();
  config.validate();
  require_same_domain(u_init.domain(), v.domain(), "minimize_u");
  if (params.variant == Variant::ni)
    throw std::invalid_argument("minimize_u: use minimize_u_ni for the NI variant");
  require_datum(params, datum, "minimize_u");

  VectorField u = u_init;
  const bool pinned = datum != nullptr && has_dirichlet_nodes(u.domain());
  if (pinned) apply_dirichlet(u, *datum);
  const auto mask = free_entries(u.domain(), pinned);
  const DisplacementOperator op(v, params, true);

  // Solve H_ff w = -grad_f(u) for the correction w on the free entries.
  const std::size_t n = mask.size();
  std::vector<double> b(n), w(n, 0.0);
  op.apply(u.values(), b);
  for (std::size_t i = 0; i < n; ++i) b[i] = mask[i] ? -b[i] : 0.0;
  std::vector<double> scratch(n);
  const auto apply = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) scratch[i] = mask[i] ? in[i] : 0.0;
    op.apply(scratch, out);
    for (std::size_t i = 0; i < n; ++i)
      if (!mask[i]) out[i] = 0.0;
  };
  const CgResult cg = conjugate_gradient(apply, b, w, config.cg_tolerance, config.cg_max_iterations);
  auto values = u.values();
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i]) values[i] += w[i];
  if (info) {
    info->iterations = cg.iterations;
    info->converged = cg.converged || cg.curvature_stop;
  }
  return u;
}

ScalarField minimize_v(const VectorField& u, const ScalarField& v_init, const EnergyParams& params,
                       const SolverConfig& config, const VectorFunction* datum, SubstepInfo* info) {
  params.validate();
  config.validate();
  require_same_domain(u.domain(), v_init.domain(), "minimize_v");
  require_datum(params, datum, "minimize_v");
  const LatticeDomain& d = u.domain();
  const int dim = d.dim();
  const std::size_t count = d.node_count();
  const bool pinned = datum != nullptr && has_dirichlet_nodes(d);

  // Coefficient of v(alpha)^2 collected from the elastic and divergence summands.
  std::vector<double> a(count, 0.0);
  const double w = lattice_weight(d);
  const DirectionSet sigma = params.directions(dim);
  for (const auto& xi : sigma.vectors) {
    const double scale = 0.5 * params.lambda * sigma.weight(xi) * w;
    for (std::size_t node : range_nodes(d, xi)) a[node] += scale * sym_pair_sq(u, node, xi);
  }
  const double div_scale = params.theta * w / static_cast<double>(1 << dim);
  for (std::size_t node : range_div(d)) {
    const double s = params.variant == Variant::ni ? div_pm_sq(u, node, DivergencePart::positive)
                                                   : div_sq_total(u, node);
    a[node] += div_scale * s;
  }

  std::vector<std::uint8_t> free(count, 0);
  for (std::size_t node = 0; node < count; ++node)
    free[node] = d.active(node) && !(pinned && d.dirichlet(node));

  // (diag(2a + delta^d / eps) + eps delta^{d-2} L) v = delta^d / eps on the free nodes.
  const double mass = std::pow(d.spacing(), dim) / params.eps;
  const double stiff = params.eps * w;
  std::vector<std::array<std::size_t, 2 * kMaxDim>> neighbours(count);
  std::vector<int> degree(count, 0);
  std::vector<double> rhs(count, 0.0), x(count, 0.0), diagonal(count, 0.0);
  for (std::size_t node = 0; node < count; ++node) {
    if (!free[node]) continue;
    rhs[node] = mass;
    x[node] = v_init[node];
    diagonal[node] = 2.0 * a[node] + mass;
    for (int k = 0; k < dim; ++k)
      for (int sgn : {-1, 1}) {
        LatticeVector e{0, 0, 0};
        e[k] = sgn;
        if (!d.in_grid(node, e)) continue;
        const std::size_t other = d.shifted(node, e);
        if (!d.active(other)) continue;
        diagonal[node] += stiff;
        if (free[other])
          neighbours[node][static_cast<std::size_t>(degree[node]++)] = other;
        else
          rhs[node] += stiff;  // pinned neighbour at v = 1
      }
  }
  const auto apply = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t node = 0; node < count; ++node) {
      if (!free[node]) {
        out[node] = 0.0;
        continue;
      }
      double sum = 0.0;
      for (int j = 0; j < degree[node]; ++j) sum += in[neighbours[node][static_cast<std::size_t>(j)]];
      out[node] = diagonal[node] * in[node] - stiff * sum;
    }
  };
  const CgResult cg = conjugate_gradient(apply, rhs, x, config.cg_tolerance, config.cg_max_iterations);

  ScalarField v = v_init;
  double correction = 0.0;
  for (std::size_t node = 0; node < count; ++node) {
    if (!free[node]) continue;
    const double clamped = std::clamp(x[node], 0.0, 1.0);
    correction = std::max(correction, std::abs(clamped - x[node]));
    v[node] = clamped;
  }
  if (pinned) apply_dirichlet(v);
  if (info) {
    info->iterations = cg.iterations;
    info->converged = cg.converged;
    info->clamp_correction = correction;
  }
  return v;
}

VectorField minimize_u_ni(const VectorField& u_init, const ScalarField& v,
                          const EnergyParams& params, const SolverConfig& config,
                          const VectorFunction* datum, SubstepInfo* info) {
  params.validate();
  config.validate();
  require_same_domain(u_init.domain(), v.domain(), "minimize_u_ni");
  if (params.variant != Variant::ni) throw std::invalid_argument("minimize_u_ni: variant must be ni");
  const double bound = *params.max_displacement;
  const LatticeDomain& d = u_init.domain();
  const int dim = d.dim();

  VectorField u = u_init;
  const bool pinned = datum != nullptr && has_dirichlet_nodes(d);
  if (pinned) apply_dirichlet(u, *datum);
  if (u.max_norm() > bound) throw std::invalid_argument("minimize_u_ni: start violates |u| <= M");
  const auto mask = free_entries(d, pinned);
  const std::size_t n = mask.size();
  const DisplacementOperator elastic(v, params, false);

  const auto gradient = [&](const VectorField& at, std::vector<double>& g) {
    elastic.apply(at.values(), g);
    add_ni_divergence_gradient(at, v, params, g);
    for (std::size_t i = 0; i < n; ++i)
      if (!mask[i]) g[i] = 0.0;
  };
  const auto project = [&](VectorField& f) {
    for (std::size_t node = 0; node < d.node_count(); ++node)
      if (mask[node * static_cast<std::size_t>(dim)]) project_node(f.values(), node, dim, bound);
  };
  const auto max_abs = [](std::span<const double> x) {
    double m = 0.0;
    for (double e : x) m = std::max(m, std::abs(e));
    return m;
  };

  std::vector<double> g(n), g_next(n), step(n);
  gradient(u, g);
  double f = ni_objective(u, v, params, config.policy);
  double t = 1.0;
  double first_measure = -1.0;
  long long iterations = 0;
  bool converged = false;
  int stalled = 0;
  VectorField trial = u;

  for (int it = 0; it < config.ni_max_iterations; ++it) {
    // Stationarity measure: the projected unit gradient step.
    VectorField probe = u;
    for (std::size_t i = 0; i < n; ++i) probe.values()[i] -= g[i];
    project(probe);
    for (std::size_t i = 0; i < n; ++i) step[i] = probe.values()[i] - u.values()[i];
    const double measure = max_abs(step);
    if (first_measure < 0.0) first_measure = measure;
    if (measure <= config.ni_tolerance * std::max(first_measure, std::numeric_limits<double>::min())) {
      converged = true;
      break;
    }

    bool accepted = false;
    double change = 0.0;
    double f_trial = f;
    for (int bt = 0; bt < config.max_backtracks; ++bt) {
      trial = u;
      for (std::size_t i = 0; i < n; ++i) trial.values()[i] -= t * g[i];
      project(trial);
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        step[i] = trial.values()[i] - u.values()[i];
        slope += g[i] * step[i];
      }
      change = max_abs(step);
      if (change == 0.0) break;
      f_trial = ni_objective(trial, v, params, config.policy);
      if (f_trial <= f + config.armijo * slope) {
        accepted = true;
        break;
      }
      t *= config.backtrack;
    }
    if (!accepted) {
      if (change <= 1e-14 * (1.0 + u.max_norm())) {
        converged = true;
        break;
      }
      throw std::runtime_error("minimize_u_ni: line search failed");
    }

    gradient(trial, g_next);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ss += step[i] * step[i];
      sy += step[i] * (g_next[i] - g[i]);
    }
    t = sy > 0.0 ? ss / sy : 2.0 * t;
    std::swap(u, trial);
    std::swap(g, g_next);
    // Decrease at round-off level for several steps: no further progress is representable.
    stalled = f - f_trial <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(f) ? stalled + 1 : 0;
    f = f_trial;
    ++iterations;
    if (stalled >= 10) {
      converged = true;
      break;
    }
  }
  if (info) {
    info->iterations = iterations;
    info->converged = converged;
  }
  return u;
}

SolveResult alternate_minimize(const VectorField& u0, const ScalarField& v0,
                               const EnergyParams& params, const SolverConfig& config,
                               const VectorFunction* datum) {
  params.validate();
  config.validate();
  require_datum(params, datum, "alternate_minimize");
  const auto start = std::chrono::steady_clock::now();
  SolveResult result{u0, v0, {}};
  if (datum != nullptr) {
    apply_dirichlet(result.u, *datum);
    apply_dirichlet(result.v);
  }
  SolveReport& report = result.report;
  const auto evaluate = [&] {
    return total_energy(result.u, result.v, params, datum, config.policy);
  };
  report.trace.push_back(evaluate());
  double previous = total_or_inf(report.trace.back());

  for (int it = 0; it < config.max_outer_iterations; ++it) {
    SubstepInfo info;
    if (params.variant == Variant::ni)
      result.u = minimize_u_ni(result.u, result.v, params, config, datum, &info);
    else
      result.u = minimize_u(result.u, result.v, params, config, datum, &info);
    (params.variant == Variant::ni ? report.ni_iterations : report.cg_iterations) += info.iterations;
    report.substep_totals.push_back(total_or_inf(evaluate()));

    result.v = minimize_v(result.u, result.v, params, config, datum, &info);
    report.cg_iterations += info.iterations;
    report.max_clamp_correction = std::max(report.max_clamp_correction, info.clamp_correction);
    report.trace.push_back(evaluate());
    report.substep_totals.push_back(total_or_inf(report.trace.back()));
    report.outer_iterations = it + 1;

    const double current = total_or_inf(report.trace.back());
    const double decrease = previous - current;
    previous = current;
    if (decrease <= config.outer_tolerance * std::max(std::abs(current), 1e-300)) {
      report.converged = true;
      break;
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

VectorField default_displacement(const DomainPtr& domain, const VectorFunction* datum) {
  VectorField u = VectorField::zero(domain);
  if (datum == nullptr) return u;
  const LatticeDomain& d = *domain;
  std::vector<std::size_t> source(d.node_count(), std::numeric_limits<std::size_t>::max());
  std::deque<std::size_t> queue;
  for (std::size_t n = 0; n < d.node_count(); ++n)
    if (d.dirichlet(n)) {
      source[n] = n;
      queue.push_back(n);
    }
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    for (int k = 0; k < d.dim(); ++k)
      for (int sgn : {-1, 1}) {
        LatticeVector e{0, 0, 0};
        e[k] = sgn;
        if (!d.in_grid(n, e)) continue;
        const std::size_t m = d.shifted(n, e);
        if (!d.active(m) || source[m] != std::numeric_limits<std::size_t>::max()) continue;
        source[m] = source[n];
        queue.push_back(m);
      }
  }
  for (std::size_t n = 0; n < d.node_count(); ++n)
    if (source[n] != std::numeric_limits<std::size_t>::max())
      u.set(n, (*datum)(d.position(source[n])));
  return u;
}

}  // namespace latfrac
