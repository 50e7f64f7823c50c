#include "latfrac/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace latfrac {

namespace {

void write_header(std::ostream& out, const LatticeDomain& d, int comps) {
  out << "GLF1 d=" << d.dim() << " n=";
  for (int k = 0; k < d.dim(); ++k) out << (k ? "," : "") << d.extents()[k];
  out << " delta=" << format_real(d.spacing()) << " comps=" << comps << '\n';
}

void write_rows(std::ostream& out, std::span<const double> values, int comps) {
  const std::size_t stride = static_cast<std::size_t>(comps);
  for (std::size_t i = 0; i < values.size(); i += stride) {
    for (std::size_t k = 0; k < stride; ++k) {
      if (k) out << ' ';
      out << format_real(values[i + k]);
    }
    out << '\n';
  }
}

std::string expect_key(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0)
    throw std::runtime_error("field file: expected '" + key + "=' in header, got '" + token + "'");
  return token.substr(key.size() + 1);
}

void check_header(const FieldFile& file, const LatticeDomain& domain, int comps) {
  if (file.dim != domain.dim() || file.comps != comps)
    throw std::invalid_argument("field file: dimension or component count mismatch");
  for (int k = 0; k < domain.dim(); ++k)
    if (file.extents[k] != domain.extents()[k])
      throw std::invalid_argument("field file: node counts do not match the lattice");
  if (file.delta != domain.spacing())
    throw std::invalid_argument("field file: spacing does not match the lattice");
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field(std::ostream& out, const ScalarField& field) {
  write_header(out, field.domain(), 1);
  write_rows(out, field.values(), 1);
}

void write_field(std::ostream& out, const VectorField& field) {
  write_header(out, field.domain(), field.dim());
  write_rows(out, field.values(), field.dim());
}

void write_field_file(const std::string& path, const ScalarField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(out, field);
}

void write_field_file(const std::string& path, const VectorField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(out, field);
}

FieldFile read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("field file: missing header");
  std::istringstream header(line);
  std::string magic, d_tok, n_tok, delta_tok, comps_tok, extra;
  header >> magic >> d_tok >> n_tok >> delta_tok >> comps_tok;
  if (magic != "GLF1") throw std::runtime_error("field file: bad magic '" + magic + "'");
  if (header >> extra) throw std::runtime_error("field file: trailing header token '" + extra + "'");

  FieldFile file;
  try {
    file.dim = std::stoi(expect_key(d_tok, "d"));
    file.delta = std::stod(expect_key(delta_tok, "delta"));
    file.comps = std::stoi(expect_key(comps_tok, "comps"));
    std::istringstream counts(expect_key(n_tok, "n"));
    std::string item;
    int k = 0;
    while (std::getline(counts, item, ',')) {
      if (k >= kMaxDim) throw std::runtime_error("field file: too many extents");
      file.extents[k++] = static_cast<std::size_t>(std::stoul(item));
    }
    if (k != file.dim) throw std::runtime_error("field file: extent count does not match d");
  } catch (const std::logic_error& e) {
    throw std::runtime_error(std::string("field file: malformed header: ") + e.what());
  }
  if (file.dim != 2 && file.dim != 3) throw std::runtime_error("field file: d must be 2 or 3");
  if (file.comps != 1 && file.comps != file.dim)
    throw std::runtime_error("field file: comps must be 1 or d");

  std::size_t nodes = 1;
  for (int k = 0; k < file.dim; ++k) nodes *= file.extents[k];
  file.values.reserve(nodes * static_cast<std::size_t>(file.comps));
  for (std::size_t n = 0; n < nodes; ++n) {
    if (!std::getline(in, line))
      throw std::runtime_error("field file: expected " + std::to_string(nodes) + " rows, got " +
                               std::to_string(n));
    std::istringstream row(line);
    for (int k = 0; k < file.comps; ++k) {
      std::string tok;
      if (!(row >> tok)) throw std::runtime_error("field file: short row " + std::to_string(n));
      const double x = std::stod(tok);
      if (!std::isfinite(x)) throw std::runtime_error("field file: non-finite value in row " + std::to_string(n));
      file.values.push_back(x);
    }
    std::string tok;
    if (row >> tok) throw std::runtime_error("field file: long row " + std::to_string(n));
  }
  return file;
}

FieldFile read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_field(in);
}

ScalarField to_scalar_field(const FieldFile& file, DomainPtr domain) {
  check_header(file, *domain, 1);
  return ScalarField(std::move(domain), file.values);
}

VectorField to_vector_field(const FieldFile& file, DomainPtr domain) {
  check_header(file, *domain, domain->dim());
  return VectorField(std::move(domain), file.values);
}

}  // namespace latfrac
