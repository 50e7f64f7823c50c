#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "latfrac/harness/config.hpp"

namespace latfrac::harness {

struct SweepRow {
  double eps = 0.0;
  double delta = 0.0;
  double f_elastic = 0.0;
  double f_div = 0.0;
  double g_mm = 0.0;
  double total = 0.0;
  double griffith_ref = 0.0;
  double rel_gap = 0.0;
  std::string error;  ///< empty when the row succeeded
};

/// Fields produced for one schedule entry.
struct RowFields {
  VectorField u;
  ScalarField v;
  SolveReport report;  ///< empty unless produced by minimize mode
};

/// Builds the fields of one schedule entry (recovery pair or solver output).
RowFields compute_row_fields(const ExperimentConfig& config, double eps, const ExecPolicy& policy);

/// One row per eps, in schedule order. A failing row keeps its eps and delta, carries
/// the error message, and the sweep continues. Throws ConfigError for verify mode or
/// an empty schedule.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const ExecPolicy& policy = {});

/// Header `eps,delta,f_elastic,f_div,g_mm,total,griffith_ref,rel_gap,error`, then one
/// line per row with 17 significant digits.
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace latfrac::harness
