#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "latfrac/field.hpp"

namespace latfrac {

// Text format:
//   GLF1 d=<d> n=<n_1,...,n_d> delta=<delta> comps=<1|d>
// then one line per node (row-major, last axis fastest) holding `comps`
// whitespace-separated values printed with 17 significant digits.

struct FieldFile {
  int dim = 0;
  MultiIndex extents{1, 1, 1};
  double delta = 0.0;
  int comps = 0;
  std::vector<double> values;
};

void write_field(std::ostream& out, const ScalarField& field);
void write_field(std::ostream& out, const VectorField& field);
void write_field_file(const std::string& path, const ScalarField& field);
void write_field_file(const std::string& path, const VectorField& field);

/// Parses a field file. Throws std::runtime_error on malformed input.
FieldFile read_field(std::istream& in);
FieldFile read_field_file(const std::string& path);

/// Attaches parsed values to `domain`; throws std::invalid_argument when the header
/// (dimension, extents, spacing, component count) does not match.
ScalarField to_scalar_field(const FieldFile& file, DomainPtr domain);
VectorField to_vector_field(const FieldFile& file, DomainPtr domain);

/// Formats x with 17 significant digits (round-trip exact for doubles).
std::string format_real(double x);

}  // namespace latfrac
