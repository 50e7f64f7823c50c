#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "latfrac/energy.hpp"
#include "latfrac/griffith.hpp"
#include "latfrac/recovery.hpp"
#include "latfrac/solver.hpp"

namespace latfrac::harness {

/// Raised for malformed or schema-violating experiment configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { evaluate_recovery, minimize, verify };

std::string to_string(Mode mode);

/// delta = coefficient * eps^exponent.
struct ScalingRule {
  double coefficient = 1.0;
  double exponent = 2.0;
  std::string preset;  ///< name of the preset it came from, empty for explicit rules

  double delta(double eps) const { return coefficient * std::pow(eps, exponent); }
};

/// `subcritical` (p = 2), `critical` (p = 1) and `ni-upper` (p = 3), all with c = 1.
/// Throws ConfigError for an unknown name.
ScalingRule scaling_preset(const std::string& name);

enum class TargetKind { jump, affine };

struct TargetSpec {
  TargetKind kind = TargetKind::jump;
  double offset = 0.5;          ///< crack plane {x_d = offset} for jump targets
  Point jump{0.0, 1.0, 0.0};    ///< displacement above the plane
  Matrix matrix{};              ///< affine targets: u = matrix x + shift
  Point shift{0.0, 0.0, 0.0};
};

/// Initial fields for minimize mode.
struct InitSpec {
  double noise = 0.0;           ///< uniform displacement noise amplitude on free nodes (seeded)
  std::optional<Point> notch;   ///< centre of a v = 0 notch
  double notch_radius = 0.0;
};

struct ExperimentConfig {
  int version = 1;
  Mode mode = Mode::evaluate_recovery;
  std::uint64_t seed = 0;
  Box box = Box::unit(2);
  DirichletSpec dirichlet;
  TargetSpec target;
  double lambda = 1.0;
  double theta = 1.0;
  std::optional<double> max_displacement;
  Variant variant = Variant::plain;
  std::vector<double> eps;
  ScalingRule scaling;
  RecoveryOptions recovery;
  bool translation_scan = false;
  SolverConfig solver;
  InitSpec init;
  std::string out_dir = ".";
  std::string csv_name = "sweep.csv";
  std::vector<std::string> verify_suites;

  /// Energy parameters for one schedule entry.
  EnergyParams params(double eps_value) const;
};

/// Parses a TOML document. Every table rejects unknown keys, naming them in the error.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);

/// Continuum target described by the configuration.
GriffithReference make_target(const ExperimentConfig& config);

/// Boundary datum: the target displacement, used when Dirichlet faces are declared.
VectorFunction make_datum(const ExperimentConfig& config);

}  // namespace latfrac::harness
