#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "latfrac/field.hpp"
#include "latfrac/reduce.hpp"

namespace latfrac {

enum class Variant { plain, dirichlet, ni };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

/// Weights and scales of the discrete functional.
struct EnergyParams {
  double lambda = 1.0;
  double theta = 1.0;
  double eps = 0.1;    ///< phase-field width
  double delta = 0.01; ///< lattice spacing
  std::optional<double> max_displacement;  ///< L-infinity bound M, required by Variant::ni
  Variant variant = Variant::plain;
  std::optional<DirectionSet> sigma;  ///< overrides the default kernel weights

  /// Throws std::invalid_argument when a scale is not strictly positive or M is missing.
  void validate() const;
  DirectionSet directions(int dim) const;
};

/// Itemized energy. `total` is empty (the +infinity sentinel) when the pair violates
/// the variant's admissibility constraint.
struct EnergyBreakdown {
  double f_elastic_raw = 0.0;  ///< elastic lattice energy before the lambda weight
  double f_div_raw = 0.0;      ///< divergence energy (NI form for Variant::ni) before theta
  double g_mm = 0.0;           ///< Modica-Mortola term
  double lambda = 1.0;
  double theta = 1.0;
  std::optional<double> total;

  bool admissible() const { return total.has_value(); }
  double f_elastic() const { return lambda * f_elastic_raw; }
  double f_div() const { return theta * f_div_raw; }
};

/// {f_elastic_raw, f_div_raw, g_mm, lambda, theta, total, admissible}; an inadmissible
/// total is written as the string "inf".
nlohmann::json to_json(const EnergyBreakdown& b);

/// Elastic energy along one lattice direction:
///   1/2 sum_{alpha in R^xi} delta^{d-2} v(alpha)^2 (|D^xi u|^2 + |D^{-xi} u|^2).
/// With `subset`, the sum runs over the localized range R^xi(A).
double elastic_direction_energy(const VectorField& u, const ScalarField& v,
                                const LatticeVector& xi, const NodeMask* subset = nullptr,
                                const ExecPolicy& policy = {});

/// Weighted sum of elastic_direction_energy over the direction set.
double elastic_energy(const VectorField& u, const ScalarField& v, const DirectionSet& sigma,
                      const NodeMask* subset = nullptr, const ExecPolicy& policy = {});

/// 2^{-d} sum_{alpha in R^div} delta^{d-2} v(alpha)^2 |Div u(alpha)|^2.
double divergence_energy(const VectorField& u, const ScalarField& v,
                         const NodeMask* subset = nullptr, const ExecPolicy& policy = {});

/// Positive-part divergence energy, weighted by v^2.
double divergence_energy_positive(const VectorField& u, const ScalarField& v,
                                  const ExecPolicy& policy = {});
/// Negative-part divergence energy; independent of the phase field.
double divergence_energy_negative(const VectorField& u, const ExecPolicy& policy = {});
/// Non-interpenetration divergence energy: positive part (v-weighted) plus negative part.
double divergence_energy_ni(const VectorField& u, const ScalarField& v,
                            const ExecPolicy& policy = {});

/// Discrete Modica-Mortola term
///   1/2 sum_alpha delta^d ((v-1)^2 / eps + eps sum_k ((v(alpha + delta e_k) - v(alpha)) / delta)^2),
/// where the inner sum skips axes whose forward neighbour is not in the lattice (or subset).
double phase_field_energy(const ScalarField& v, double eps, const NodeMask* subset = nullptr,
                          const ExecPolicy& policy = {});

/// Evaluates the variant's total energy.
///
/// Variant::dirichlet requires `datum` and checks u == datum and v == 1 exactly on the
/// Dirichlet layer; Variant::ni checks max |u(alpha)| <= M and uses the NI divergence.
EnergyBreakdown total_energy(const VectorField& u, const ScalarField& v, const EnergyParams& params,
                             const VectorFunction* datum = nullptr, const ExecPolicy& policy = {});

struct LatticeCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

/// Closed-form coefficients of the direction-sum identity for the given weights.
LatticeCoefficients lattice_coefficients(const DirectionSet& sigma);

struct QuadraticFormValues {
  double lhs = 0.0;  ///< sum_xi sigma / |xi|^4 <M xi, xi>^2, by direct summation
  double rhs = 0.0;  ///< c1 sum M_ii^2 + 2 c2 sum_{i<j} M_ij^2 + c3 (tr M)^2
};

/// Both sides of the direction-sum identity. Throws for a non-symmetric M.
QuadraticFormValues quadratic_form_identity(const Matrix& m, const DirectionSet& sigma);

}  // namespace latfrac
