#include "latfrac/harness/sweep.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "latfrac/field_io.hpp"

namespace latfrac::harness {

namespace {

std::optional<VectorFunction> datum_for(const ExperimentConfig& config) {
  if (config.dirichlet.faces.empty()) return std::nullopt;
  return make_datum(config);
}

DomainPtr row_domain(const ExperimentConfig& config, const EnergyParams& params) {
  return build_domain(config.box, params.delta, config.dirichlet);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

RowFields compute_row_fields(const ExperimentConfig& config, double eps, const ExecPolicy& policy) {
  const EnergyParams params = config.params(eps);
  const DomainPtr domain = row_domain(config, params);
  const GriffithReference target = make_target(config);
  const auto datum = datum_for(config);

  if (config.mode == Mode::evaluate_recovery) {
    if (!target.crack) {
      const VectorFunction sampler = make_datum(config);
      return {VectorField::sample(domain, sampler), ScalarField::constant(domain, 1.0), {}};
    }
    RecoveryOptions options = config.recovery;
    if (config.translation_scan) {
      const TranslationScan scan = translation_scan(target, domain, params, options, policy);
      options.shift = scan.shifts[scan.best];
    }
    RecoveryPair pair = build_recovery(target, domain, params, options);
    return {std::move(pair.u), clamp_min_one(pair.v), {}};
  }
  if (config.mode != Mode::minimize)
    throw ConfigError("verify mode has no sweep rows; use the verify command");

  VectorField u0 = default_displacement(domain, datum ? &*datum : nullptr);
  ScalarField v0 = ScalarField::constant(domain, 1.0);
  const LatticeDomain& d = *domain;
  if (config.init.noise > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> dist(-config.init.noise, config.init.noise);
    for (std::size_t n = 0; n < d.node_count(); ++n) {
      if (!d.active(n) || (datum && d.dirichlet(n))) continue;
      for (int k = 0; k < d.dim(); ++k) u0(n, k) += dist(rng);
    }
  }
  if (config.init.notch) {
    for (std::size_t n = 0; n < d.node_count(); ++n) {
      const Point x = d.position(n);
      double r2 = 0.0;
      for (int k = 0; k < d.dim(); ++k) r2 += (x[k] - (*config.init.notch)[k]) * (x[k] - (*config.init.notch)[k]);
      if (std::sqrt(r2) <= config.init.notch_radius) v0[n] = 0.0;
    }
  }
  if (params.variant == Variant::ni) {
    // Keep the start feasible for the displacement bound.
    const double bound = *params.max_displacement;
    for (std::size_t n = 0; n < d.node_count(); ++n) {
      const Point p = u0.at(n);
      const double len = norm(p, d.dim());
      if (len > bound) {
        Point q{};
        for (int k = 0; k < d.dim(); ++k) q[k] = bound == 0.0 ? 0.0 : p[k] * (bound / len) * (1.0 - 1e-15);
        u0.set(n, q);
      }
    }
  }
  SolverConfig solver = config.solver;
  solver.policy = policy;
  SolveResult result = alternate_minimize(u0, v0, params, solver, datum ? &*datum : nullptr);
  return {std::move(result.u), std::move(result.v), std::move(result.report)};
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const ExecPolicy& policy) {
  if (config.mode == Mode::verify) throw ConfigError("verify mode has no sweep rows; use the verify command");
  if (config.eps.empty()) throw ConfigError("config key 'schedule.eps': empty schedule");
  const GriffithReference target = make_target(config);
  const double reference = griffith_energy(target, config.lambda, config.theta).total;
  const auto datum = datum_for(config);

  std::vector<SweepRow> rows;
  for (double eps : config.eps) {
    SweepRow row;
    row.eps = eps;
    row.delta = config.scaling.delta(eps);
    row.griffith_ref = reference;
    try {
      const EnergyParams params = config.params(eps);
      const RowFields fields = compute_row_fields(config, eps, policy);
      const EnergyBreakdown e =
          total_energy(fields.u, fields.v, params, datum ? &*datum : nullptr, policy);
      row.f_elastic = e.f_elastic();
      row.f_div = e.f_div();
      row.g_mm = e.g_mm;
      if (!e.total) throw std::runtime_error("fields violate the admissibility constraint");
      row.total = *e.total;
      row.rel_gap = reference != 0.0 ? std::abs(row.total - reference) / std::abs(reference)
                                     : std::abs(row.total);
    } catch (const std::exception& ex) {
      row.error = ex.what();
      row.f_elastic = row.f_div = row.g_mm = row.total = row.rel_gap = std::nan("");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "eps,delta,f_elastic,f_div,g_mm,total,griffith_ref,rel_gap,error\n";
  for (const auto& r : rows) {
    out << format_real(r.eps) << ',' << format_real(r.delta) << ',' << format_real(r.f_elastic) << ','
        << format_real(r.f_div) << ',' << format_real(r.g_mm) << ',' << format_real(r.total) << ','
        << format_real(r.griffith_ref) << ',' << format_real(r.rel_gap) << ',' << csv_field(r.error)
        << '\n';
  }
}

}  // namespace latfrac::harness
