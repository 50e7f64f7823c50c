#pragma once

#include <cmath>
#include <vector>

#include "latfrac/energy.hpp"
#include "latfrac/griffith.hpp"

namespace latfrac {

/// Near-optimal one-dimensional transition profile f: [0, inf) -> [0, 1].
///
/// Follows g(t) = 1 - exp(-t) up to T - 1 and is blended to the constant 1 on
/// [T - 1, T] by a quintic matching value, slope and curvature at both ends, with
/// T = -2 ln(eta / 8). Construction certifies
///   I = int_0^T (f - 1)^2 + f'^2 dt <= 1 + eta
/// by adaptive quadrature.
class OptimalProfile {
 public:
  double eta() const { return eta_; }
  double support() const { return support_; }
  double integral() const { return integral_; }

  double operator()(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

 private:
  friend OptimalProfile build_profile(double eta);
  double eta_ = 0.0;
  double support_ = 0.0;
  double integral_ = 0.0;
  // Patch coefficients: f = 1 + q0 H0(s) + q1 H1(s) + q2 H2(s), s = t - (T - 1).
  double q0_ = 0.0, q1_ = 0.0, q2_ = 0.0;
};

/// Throws std::invalid_argument unless 0 < eta < 1 and std::runtime_error when the
/// certified integral exceeds 1 + eta.
OptimalProfile build_profile(double eta);

/// Inner tube half-width gamma(eps) = coefficient * eps^exponent.
struct GammaRule {
  double coefficient = 1.0;
  double exponent = 2.5;
  double operator()(double eps) const { return coefficient * std::pow(eps, exponent); }
};

struct RecoveryOptions {
  double eta = 0.1;
  GammaRule gamma;
  /// Accept crack tubes that reach the boundary of Omega (full-line test mode).
  bool allow_boundary_crack = false;
  /// Continuum formulas are sampled at alpha + delta * shift, shift in [0,1)^d.
  Point shift{0.0, 0.0, 0.0};
};

struct RecoveryPair {
  VectorField u;
  ScalarField v;
  double gamma = 0.0;
  double profile_integral = 0.0;
};

/// Smooth cut-off: 1 for s <= inner, 0 for s >= outer, exp(-1/t) blend in between.
double smooth_cutoff(double s, double inner, double outer);

/// Builds the recovery pair for a target with a planar crack on {x_d = c}.
///
/// u_eps = u (1 - phi), phi a cut-off between the inner and outer crack tubes of
/// half-widths (eps/2, gamma/2) and (eps, gamma); v_eps = psi h + 1 - psi with psi a
/// tangential cut-off between K_{eps + sqrt(d) delta} and K_{2 eps + sqrt(d) delta},
/// and h the profile layer starting at gamma + sqrt(d) delta from the plane. v is
/// clamped to [0, 1].
///
/// Throws std::invalid_argument when the target has no crack, delta >= eps, the
/// domain spacing differs from params.delta, or the tube leaves Omega without
/// allow_boundary_crack.
RecoveryPair build_recovery(const GriffithReference& target, const DomainPtr& domain,
                            const EnergyParams& params, const RecoveryOptions& options = {});

/// Nodal min(v, 1).
ScalarField clamp_min_one(const ScalarField& v);

struct TranslationScan {
  std::vector<Point> shifts;
  std::vector<double> totals;
  std::size_t best = 0;
};

/// Evaluates the recovery energy for the 3^d shifts {0, 1/3, 2/3}^d.
TranslationScan translation_scan(const GriffithReference& target, const DomainPtr& domain,
                                 const EnergyParams& params, const RecoveryOptions& options = {},
                                 const ExecPolicy& policy = {});

}  // namespace latfrac
