#include "latfrac/operators.hpp"

#include <stdexcept>

namespace latfrac {

namespace {

std::vector<SignPattern> enumerate_patterns(int dim) {
  std::vector<SignPattern> patterns;
  const int count = 1 << dim;
  for (int bits = 0; bits < count; ++bits) {
    SignPattern s;
    s.dim = dim;
    for (int i = 0; i < dim; ++i) s.k[i] = (bits >> (dim - 1 - i)) & 1 ? 1 : -1;
    patterns.push_back(s);
  }
  return patterns;
}

}  // namespace

const std::vector<SignPattern>& sign_patterns(int dim) {
  static const std::vector<SignPattern> two = enumerate_patterns(2);
  static const std::vector<SignPattern> three = enumerate_patterns(3);
  if (dim == 2) return two;
  if (dim == 3) return three;
  throw std::invalid_argument("sign_patterns: dimension must be 2 or 3");
}

double div_sq_total(const VectorField& u, std::size_t node) {
  double total = 0.0;
  for (const auto& s : sign_patterns(u.dim())) {
    const double g = div_directed(u, node, s);
    total += g * g;
  }
  return total;
}

double div_pm_sq(const VectorField& u, std::size_t node, DivergencePart part) {
  double total = 0.0;
  for (const auto& s : sign_patterns(u.dim())) {
    const double g = div_directed(u, node, s);
    const double p = part == DivergencePart::positive ? positive_part(g) : negative_part(g);
    total += p * p;
  }
  return total;
}

}  // namespace latfrac
