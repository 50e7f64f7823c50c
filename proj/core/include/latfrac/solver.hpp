#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "latfrac/energy.hpp"

namespace latfrac {

struct SolverConfig {
  double outer_tolerance = 1e-6;  ///< stop when the relative energy decrease falls below this
  int max_outer_iterations = 50;
  double cg_tolerance = 1e-10;
  int cg_max_iterations = 20000;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  double ni_tolerance = 1e-12;  ///< projected-gradient tolerance relative to the first step
  int ni_max_iterations = 50000;
  ExecPolicy policy;

  /// Throws std::invalid_argument for non-positive tolerances or caps below one.
  void validate() const;
};

struct SolveReport {
  std::vector<EnergyBreakdown> trace;  ///< initial state, then one entry per outer iteration
  std::vector<double> substep_totals;  ///< total after every u- and v-substep
  bool converged = false;
  int outer_iterations = 0;
  long long cg_iterations = 0;
  long long ni_iterations = 0;
  double max_clamp_correction = 0.0;  ///< largest distance of a v-substep solution to [0,1]
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const SolveReport& report);

struct SolveResult {
  VectorField u;
  ScalarField v;
  SolveReport report;
};

/// Statistics of a single substep.
struct SubstepInfo {
  long long iterations = 0;
  bool converged = false;
  double clamp_correction = 0.0;
};

// Dirichlet handling: when `datum` is given, Dirichlet-masked nodes are pinned to
// u = datum and v = 1 and only the remaining active nodes are unknowns. The
// Dirichlet variant requires a datum.

/// Minimizes lambda F(u, v) + theta F_div(u, v) over u by CG on the free nodes.
/// Rejects Variant::ni.
VectorField minimize_u(const VectorField& u_init, const ScalarField& v, const EnergyParams& params,
                       const SolverConfig& config = {}, const VectorFunction* datum = nullptr,
                       SubstepInfo* info = nullptr);

/// Minimizes the energy over v by CG on the linear optimality system, then clamps to [0, 1].
/// For Variant::ni only the positive divergence part couples to v.
ScalarField minimize_v(const VectorField& u, const ScalarField& v_init, const EnergyParams& params,
                       const SolverConfig& config = {}, const VectorFunction* datum = nullptr,
                       SubstepInfo* info = nullptr);

/// Minimizes lambda F(u, v) + theta F_div_ni(u, v) subject to |u(alpha)| <= M at every
/// node, by projected gradient with Barzilai-Borwein steps and Armijo backtracking.
/// Throws std::invalid_argument for an infeasible start and std::runtime_error when
/// the line search fails.
VectorField minimize_u_ni(const VectorField& u_init, const ScalarField& v,
                          const EnergyParams& params, const SolverConfig& config = {},
                          const VectorFunction* datum = nullptr, SubstepInfo* info = nullptr);

/// Staggered minimization: u-substep then v-substep until the relative decrease of the
/// total energy is below the outer tolerance or the iteration cap is reached.
SolveResult alternate_minimize(const VectorField& u0, const ScalarField& v0,
                               const EnergyParams& params, const SolverConfig& config = {},
                               const VectorFunction* datum = nullptr);

/// Default start: u extends the datum to every active node by breadth-first nearest
/// Dirichlet node (zero without a datum); v = 1.
VectorField default_displacement(const DomainPtr& domain, const VectorFunction* datum);

}  // namespace latfrac
