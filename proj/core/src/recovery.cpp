#include "latfrac/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "latfrac/quadrature.hpp"

namespace latfrac {

namespace {

// Quintic Hermite basis on [0,1] carrying value, slope and curvature at s = 0
// and vanishing to second order at s = 1.
double h0(double s) { return 1.0 + s * s * s * (-10.0 + s * (15.0 - 6.0 * s)); }
double h1(double s) { return s + s * s * s * (-6.0 + s * (8.0 - 3.0 * s)); }
double h2(double s) { return 0.5 * s * s + s * s * s * (-1.5 + s * (1.5 - 0.5 * s)); }
double dh0(double s) { return s * s * (-30.0 + s * (60.0 - 30.0 * s)); }
double dh1(double s) { return 1.0 + s * s * (-18.0 + s * (32.0 - 15.0 * s)); }
double dh2(double s) { return s + s * s * (-4.5 + s * (6.0 - 2.5 * s)); }
double ddh0(double s) { return s * (-60.0 + s * (180.0 - 120.0 * s)); }
double ddh1(double s) { return s * (-36.0 + s * (96.0 - 60.0 * s)); }
double ddh2(double s) { return 1.0 + s * (-9.0 + s * (18.0 - 10.0 * s)); }

double smooth_step(double t) {
  // 0 for t <= 0, 1 for t >= 1, C-infinity in between.
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

}  // namespace

double OptimalProfile::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= support_) return 1.0;
  const double start = support_ - 1.0;
  if (t <= start) return 1.0 - std::exp(-t);
  const double s = t - start;
  return 1.0 + q0_ * h0(s) + q1_ * h1(s) + q2_ * h2(s);
}

double OptimalProfile::derivative(double t) const {
  if (t < 0.0 || t >= support_) return 0.0;
  const double start = support_ - 1.0;
  if (t <= start) return std::exp(-t);
  const double s = t - start;
  return q0_ * dh0(s) + q1_ * dh1(s) + q2_ * dh2(s);
}

double OptimalProfile::second_derivative(double t) const {
  if (t < 0.0 || t >= support_) return 0.0;
  const double start = support_ - 1.0;
  if (t <= start) return -std::exp(-t);
  const double s = t - start;
  return q0_ * ddh0(s) + q1_ * ddh1(s) + q2_ * ddh2(s);
}

OptimalProfile build_profile(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("build_profile: eta must lie in (0, 1)");
  OptimalProfile p;
  p.eta_ = eta;
  p.support_ = -2.0 * std::log(eta / 8.0);
  const double start = p.support_ - 1.0;
  const double e = std::exp(-start);
  p.q0_ = -e;
  p.q1_ = e;
  p.q2_ = -e;

  // Exponential piece in closed form; the patch integrand is a degree-10 polynomial,
  // integrated exactly by the 8-point Gauss rule.
  p.integral_ = 1.0 - std::exp(-2.0 * start);
  const GaussRule rule = gauss_legendre(8);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = start + 0.5 * (1.0 + rule.nodes[q]);
    const double f = p(t) - 1.0;
    const double df = p.derivative(t);
    p.integral_ += 0.5 * rule.weights[q] * (f * f + df * df);
  }
  if (!(p.integral_ <= 1.0 + eta))
    throw std::runtime_error("build_profile: certified integral exceeds 1 + eta");
  return p;
}

double smooth_cutoff(double s, double inner, double outer) {
  if (!(outer > inner)) throw std::invalid_argument("smooth_cutoff: outer must exceed inner");
  return 1.0 - smooth_step((s - inner) / (outer - inner));
}

RecoveryPair build_recovery(const GriffithReference& target, const DomainPtr& domain,
                            const EnergyParams& params, const RecoveryOptions& options) {
  params.validate();
  if (!target.crack) throw std::invalid_argument("build_recovery: target has no crack");
  const LatticeDomain& d = *domain;
  const int dim = d.dim();
  if (target.omega.dim != dim) throw std::invalid_argument("build_recovery: dimension mismatch");
  if (std::abs(d.spacing() - params.delta) > 1e-12 * params.delta)
    throw std::invalid_argument("build_recovery: domain spacing differs from params.delta");
  const double eps = params.eps;
  const double delta = params.delta;
  if (!(delta < eps)) throw std::invalid_argument("build_recovery: requires delta < eps");
  for (int k = 0; k < dim; ++k)
    if (!(options.shift[k] >= 0.0 && options.shift[k] < 1.0))
      throw std::invalid_argument("build_recovery: shift must lie in [0,1)^d");

  const CrackGeometry& crack = *target.crack;
  const OptimalProfile profile = build_profile(options.eta);
  const double gamma = options.gamma(eps);
  if (!(gamma > 0.0)) throw std::invalid_argument("build_recovery: gamma must be positive");
  const double collar = std::sqrt(static_cast<double>(dim)) * delta;
  const double core = gamma + collar;
  const double layer = core + eps * profile.support();

  if (!options.allow_boundary_crack) {
    const Box& omega = target.omega;
    const int normal = dim - 1;
    const bool normal_ok = crack.offset - layer > omega.origin[normal] &&
                           crack.offset + layer < omega.origin[normal] + omega.lengths[normal];
    bool tangential_ok = !crack.full_line;
    for (int k = 0; k < normal && tangential_ok; ++k)
      tangential_ok = crack.lower[k] - 2.0 * eps - collar > omega.origin[k] &&
                      crack.upper[k] + 2.0 * eps + collar < omega.origin[k] + omega.lengths[k];
    if (!normal_ok || !tangential_ok)
      throw std::invalid_argument("build_recovery: crack tube is not compactly contained in Omega");
  }

  RecoveryPair pair{VectorField::zero(domain), ScalarField::constant(domain, 1.0), gamma,
                    profile.integral()};
  const auto h = [&](double t) {
    if (t < core) return 0.0;
    if (t <= layer) return profile((t - core) / eps);
    return 1.0;
  };
  for (std::size_t n = 0; n < d.node_count(); ++n) {
    Point x = d.position(n);
    for (int k = 0; k < dim; ++k) x[k] += delta * options.shift[k];
    const double r = crack.tangential_distance(x, target.omega);
    const double z = std::abs(x[dim - 1] - crack.offset);
    const double phi = smooth_cutoff(r, 0.5 * eps, eps) * smooth_cutoff(z, 0.5 * gamma, gamma);
    // Shifted samples of boundary nodes may leave Omega; extend u by the nearest point.
    Point inside = x;
    for (int k = 0; k < dim; ++k)
      inside[k] = std::clamp(inside[k], target.omega.origin[k],
                             target.omega.origin[k] + target.omega.lengths[k]);
    const Point u = target.displacement(inside);
    Point ue{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) ue[k] = phi == 0.0 ? u[k] : u[k] * (1.0 - phi);
    pair.u.set(n, ue);
    const double psi = smooth_cutoff(r, eps + collar, 2.0 * eps + collar);
    pair.v[n] = std::clamp(psi * h(z) + 1.0 - psi, 0.0, 1.0);
  }
  return pair;
}

ScalarField clamp_min_one(const ScalarField& v) {
  ScalarField out = v;
  for (double& x : out.values()) x = std::min(x, 1.0);
  return out;
}

TranslationScan translation_scan(const GriffithReference& target, const DomainPtr& domain,
                                 const EnergyParams& params, const RecoveryOptions& options,
                                 const ExecPolicy& policy) {
  const int dim = domain->dim();
  const int count = dim == 2 ? 9 : 27;
  TranslationScan scan;
  for (int i = 0; i < count; ++i) {
    RecoveryOptions o = options;
    int rest = i;
    for (int k = dim - 1; k >= 0; --k) {
      o.shift[k] = (rest % 3) / 3.0;
      rest /= 3;
    }
    const RecoveryPair pair = build_recovery(target, domain, params, o);
    const EnergyBreakdown e = total_energy(pair.u, clamp_min_one(pair.v), params, nullptr, policy);
    scan.shifts.push_back(o.shift);
    scan.totals.push_back(e.total.value_or(std::numeric_limits<double>::infinity()));
    if (scan.totals.back() < scan.totals[scan.best]) scan.best = scan.totals.size() - 1;
  }
  return scan;
}

}  // namespace latfrac
