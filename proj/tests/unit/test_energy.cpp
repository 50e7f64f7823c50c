#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "latfrac/energy.hpp"
#include "oracles.hpp"

using namespace latfrac;

namespace {

constexpr double kOracleTol = 1e-13;

std::vector<LatticeVector> own_direction_list(int dim) {
  std::vector<LatticeVector> out;
  for (int i = 0; i < dim; ++i) out.push_back(unit_vector(i));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      LatticeVector p = unit_vector(i), m = unit_vector(i);
      p[j] = 1;
      m[j] = -1;
      out.push_back(p);
      out.push_back(m);
    }
  if (dim == 3)
    for (int b : {1, -1})
      for (int c : {1, -1}) out.push_back({1, b, c});
  return out;
}

double direct_lhs(const Matrix& m, int dim, double s1, double s2, double s3) {
  double sum = 0.0;
  for (const auto& xi : own_direction_list(dim)) {
    double form = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) form += m[i][j] * xi[i] * xi[j];
    const int l = squared_length(xi);
    const double w = l == 1 ? s1 : (l == 2 ? s2 : s3);
    sum += w * form * form / (l * l);
  }
  return sum;
}

double elastic_density(const Matrix& a, int dim) {
  const Matrix e = symmetric_part(a, dim);
  const double tr = trace(a, dim);
  return frobenius_sq(e, dim) + 0.5 * tr * tr;
}

}  // namespace

TEST(ElasticEnergy, VanishesForZeroPhaseField) {
  std::mt19937_64 rng(1);
  const DomainPtr d = build_domain(Box::unit(2), 0.125);
  const VectorField u = oracle::random_vector(d, rng);
  const ScalarField zero = ScalarField::constant(d, 0.0);
  for (const auto& xi : direction_set(2).vectors) EXPECT_EQ(elastic_direction_energy(u, zero, xi), 0.0);
  EXPECT_EQ(divergence_energy(u, zero), 0.0);
  EXPECT_EQ(elastic_energy(VectorField::zero(d), ScalarField::constant(d, 1.0), direction_set(2)), 0.0);
}

TEST(ElasticEnergy, AffineFieldAlongAxisCountsRangeNodes) {
  Matrix a{};
  a[0][0] = 1.3;
  a[0][1] = -0.4;
  a[1][0] = 0.7;
  a[1][1] = 0.2;
  for (int n : {8, 16, 32}) {
    const double delta = 1.0 / n;
    const DomainPtr d = build_domain(Box::unit(2), delta);
    const VectorField u = VectorField::sample(d, oracle::affine(a, 2));
    const ScalarField one = ScalarField::constant(d, 1.0);
    const double count = static_cast<double>((n - 1) * (n + 1));
    EXPECT_NEAR(elastic_direction_energy(u, one, {1, 0, 0}), a[0][0] * a[0][0] * delta * delta * count, 1e-12);
    const double tr = a[0][0] + a[1][1];
    const double div_count = static_cast<double>((n - 1) * (n - 1));
    EXPECT_NEAR(divergence_energy(u, one), tr * tr * delta * delta * div_count, 1e-12);
  }
}

TEST(ElasticEnergy, TotalApproachesContinuumDensity) {
  // u = (x1, -x2): |Eu|^2 + (tr Eu)^2 / 2 = 2.
  Matrix a{};
  a[0][0] = 1.0;
  a[1][1] = -1.0;
  // Diagonal directions see no strain, so only the axis ranges of (n-1)(n+1) nodes count.
  for (int n : {16, 32, 64}) {
    const double delta = 1.0 / n;
    const DomainPtr d = build_domain(Box::unit(2), delta);
    const VectorField u = VectorField::sample(d, oracle::affine(a, 2));
    const double f = elastic_energy(u, ScalarField::constant(d, 1.0), direction_set(2));
    EXPECT_NEAR(f, 2.0 - 2.0 * delta * delta, 1e-12);
  }
}

TEST(ElasticEnergy, MatchesNaiveOracle) {
  std::mt19937_64 rng(42);
  for (int dim : {2, 3}) {
    const double delta = dim == 2 ? 0.25 : 1.0 / 3.0;
    const DomainPtr d = build_domain(Box::unit(dim), delta);
    for (int trial = 0; trial < 10; ++trial) {
      const VectorField u = oracle::random_vector(d, rng);
      const ScalarField v = oracle::random_scalar(d, rng);
      for (const auto& xi : direction_set(dim).vectors)
        EXPECT_LE(oracle::rel(elastic_direction_energy(u, v, xi), oracle::elastic_direction(u, v, xi)), kOracleTol);
      EXPECT_LE(oracle::rel(divergence_energy(u, v), oracle::divergence(u, v)), kOracleTol);
      EXPECT_LE(oracle::rel(divergence_energy_positive(u, v), oracle::divergence(u, v, 1)), kOracleTol);
      EXPECT_LE(oracle::rel(divergence_energy_negative(u), oracle::divergence(u, v, -1)), kOracleTol);
      EXPECT_LE(oracle::rel(phase_field_energy(v, 0.3), oracle::modica_mortola(v, 0.3)), kOracleTol);
    }
  }
}

TEST(DivergenceEnergy, SplitIdentities) {
  std::mt19937_64 rng(8);
  for (int dim : {2, 3}) {
    const DomainPtr d = build_domain(Box::unit(dim), 0.25);
    const ScalarField one = ScalarField::constant(d, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const VectorField u = oracle::random_vector(d, rng);
      EXPECT_LE(oracle::rel(divergence_energy_ni(u, one), divergence_energy(u, one)), 1e-14);
    }
    const VectorField expand = VectorField::sample(d, [](const Point& x) { return x; });
    EXPECT_EQ(divergence_energy_negative(expand), 0.0);
    const VectorField compress = VectorField::sample(d, [](const Point& x) { return Point{-x[0], -x[1], -x[2]}; });
    const ScalarField zero = ScalarField::constant(d, 0.0);
    EXPECT_LE(oracle::rel(divergence_energy_ni(compress, zero), divergence_energy(compress, one)), 1e-14);
  }
}

TEST(PhaseFieldEnergy, ConstantFields) {
  for (int n : {4, 8, 16}) {
    const double delta = 1.0 / n;
    const DomainPtr d = build_domain(Box::unit(2), delta);
    EXPECT_EQ(phase_field_energy(ScalarField::constant(d, 1.0), 0.1), 0.0);
    const double nodes = static_cast<double>((n + 1) * (n + 1));
    EXPECT_NEAR(phase_field_energy(ScalarField::constant(d, 0.0), 0.1), 0.5 * nodes * delta * delta / 0.1, 1e-12);
  }
}

TEST(TotalEnergy, AffinePlainMatchesBulkLimit) {
  Matrix a{};
  a[0][0] = 0.5;
  a[0][1] = 0.2;
  a[1][1] = -0.3;
  const double lambda = 1.5, theta = 0.7;
  const double tr = 0.2;
  const double bulk = lambda * elastic_density(a, 2) + theta * tr * tr;
  const DomainPtr d = build_domain(Box::unit(2), 1.0 / 64);
  EnergyParams p;
  p.lambda = lambda;
  p.theta = theta;
  p.delta = 1.0 / 64;
  const EnergyBreakdown b = total_energy(VectorField::sample(d, oracle::affine(a, 2)), ScalarField::constant(d, 1.0), p);
  ASSERT_TRUE(b.admissible());
  EXPECT_EQ(b.g_mm, 0.0);
  EXPECT_LT(std::abs(*b.total - bulk) / bulk, 0.05);
  EXPECT_DOUBLE_EQ(*b.total, b.f_elastic() + b.f_div() + b.g_mm);
}

TEST(TotalEnergy, VariantSentinels) {
  const DomainPtr d = build_domain(Box::unit(2), 0.25, DirichletSpec::full_boundary(2));
  const VectorFunction datum = [](const Point& x) { return Point{x[0], 0.0, 0.0}; };
  VectorField u = VectorField::sample(d, datum);
  ScalarField v = ScalarField::constant(d, 1.0);
  EnergyParams p;
  p.delta = 0.25;
  p.variant = Variant::dirichlet;
  const EnergyBreakdown ok = total_energy(u, v, p, &datum);
  ASSERT_TRUE(ok.admissible());
  EXPECT_EQ(ok.g_mm, 0.0);
  EXPECT_GT(*ok.total, 0.0);
  EXPECT_THROW(total_energy(u, v, p), std::invalid_argument);
  u(0, 0) += 1e-15;
  EXPECT_FALSE(total_energy(u, v, p, &datum).admissible());
  u(0, 0) -= 1e-15;
  v[0] = 0.999;
  EXPECT_FALSE(total_energy(u, v, p, &datum).admissible());

  EnergyParams ni;
  ni.delta = 0.25;
  ni.variant = Variant::ni;
  ni.max_displacement = 1.0;
  const VectorField big = VectorField::sample(d, [](const Point&) { return Point{2.0, 0.0, 0.0}; });
  const EnergyBreakdown b = total_energy(big, ScalarField::constant(d, 1.0), ni);
  EXPECT_FALSE(b.admissible());
  EXPECT_EQ(to_json(b)["total"], "inf");
  ni.max_displacement.reset();
  EXPECT_THROW(total_energy(big, ScalarField::constant(d, 1.0), ni), std::invalid_argument);
}

TEST(TotalEnergy, ParamsValidation) {
  EnergyParams p;
  EXPECT_NO_THROW(p.validate());
  for (double EnergyParams::*field : {&EnergyParams::lambda, &EnergyParams::theta, &EnergyParams::eps, &EnergyParams::delta}) {
    EnergyParams q;
    q.*field = 0.0;
    EXPECT_THROW(q.validate(), std::invalid_argument);
  }
  EXPECT_THROW(parse_variant("elastic"), std::invalid_argument);
  EXPECT_EQ(parse_variant(to_string(Variant::ni)), Variant::ni);
}

TEST(TotalEnergy, JsonKeys) {
  const DomainPtr d = build_domain(Box::unit(2), 0.25);
  EnergyParams p;
  p.delta = 0.25;
  const nlohmann::json j = to_json(total_energy(VectorField::zero(d), ScalarField::constant(d, 1.0), p));
  for (const char* key : {"f_elastic_raw", "f_div_raw", "g_mm", "lambda", "theta", "total", "admissible"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["total"], 0.0);
}

TEST(TotalEnergy, QuadraticInDisplacement) {
  std::mt19937_64 rng(99);
  const DomainPtr d = build_domain(Box::unit(2), 0.125);
  EnergyParams p;
  p.delta = 0.125;
  p.eps = 0.3;
  for (int trial = 0; trial < 10; ++trial) {
    const VectorField u = oracle::random_vector(d, rng);
    const ScalarField v = oracle::random_scalar(d, rng);
    const double c = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    VectorField cu = u;
    for (double& x : cu.values()) x *= c;
    const EnergyBreakdown e = total_energy(u, v, p);
    const EnergyBreakdown ec = total_energy(cu, v, p);
    EXPECT_NEAR(*ec.total - ec.g_mm, c * c * (*e.total - e.g_mm), 1e-12 * (1.0 + c * c * *e.total));
  }
}

TEST(TotalEnergy, MonotoneInPhaseField) {
  std::mt19937_64 rng(100);
  for (int dim : {2, 3}) {
    const DomainPtr d = build_domain(Box::unit(dim), 0.25);
    for (int trial = 0; trial < 10; ++trial) {
      const VectorField u = oracle::random_vector(d, rng);
      const ScalarField lo = oracle::random_scalar(d, rng);
      ScalarField hi = lo;
      for (double& x : hi.values()) x += std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      EXPECT_LE(elastic_energy(u, lo, direction_set(dim)), elastic_energy(u, hi, direction_set(dim)));
      EXPECT_LE(divergence_energy(u, lo), divergence_energy(u, hi));
    }
  }
}

TEST(TotalEnergy, LocalizedSubsetsAreSuperadditive) {
  // Ranges of a subset require the whole stencil inside it, so stencils crossing the cut
  // are lost; subsets separated by more than the stencil reach add up exactly.
  std::mt19937_64 rng(12);
  const DomainPtr d = build_domain(Box::unit(2), 0.0625);
  const VectorField u = oracle::random_vector(d, rng);
  const ScalarField v = oracle::random_scalar(d, rng);
  NodeMask left(d->node_count()), right(d->node_count()), both(d->node_count());
  for (std::size_t n = 0; n < d->node_count(); ++n) {
    const double x = d->position(n)[0];
    left[n] = x < 0.4;
    right[n] = x > 0.6;
    both[n] = left[n] || right[n];
  }
  const DirectionSet s = direction_set(2);
  for (const auto& xi : s.vectors) {
    const double sum = elastic_direction_energy(u, v, xi, &left) + elastic_direction_energy(u, v, xi, &right);
    EXPECT_NEAR(elastic_direction_energy(u, v, xi, &both), sum, 1e-13 * sum);
  }
  NodeMask lower(d->node_count()), upper(d->node_count());
  for (std::size_t n = 0; n < d->node_count(); ++n) {
    lower[n] = d->position(n)[1] < 0.5;
    upper[n] = !lower[n];
  }
  for (const auto& xi : s.vectors)
    EXPECT_LE(elastic_direction_energy(u, v, xi, &lower) + elastic_direction_energy(u, v, xi, &upper),
              elastic_direction_energy(u, v, xi) * (1.0 + 1e-14));
  EXPECT_NEAR(phase_field_energy(v, 0.2, &both), phase_field_energy(v, 0.2, &left) + phase_field_energy(v, 0.2, &right),
              1e-13);
}

TEST(TotalEnergy, DeterministicReductionIsThreadIndependent) {
  std::mt19937_64 rng(4);
  const DomainPtr d = build_domain(Box::unit(2), 1.0 / 96);
  const VectorField u = oracle::random_vector(d, rng);
  const ScalarField v = oracle::random_scalar(d, rng);
  EnergyParams p;
  p.delta = 1.0 / 96;
  const double ref = *total_energy(u, v, p, nullptr, {1, true}).total;
  for (int threads : {2, 3, 4, 7}) {
    EXPECT_EQ(*total_energy(u, v, p, nullptr, {threads, true}).total, ref);
    EXPECT_NEAR(*total_energy(u, v, p, nullptr, {threads, false}).total, ref, 1e-12 * ref);
  }
}

TEST(QuadraticForm, IdentityMatrixValues) {
  Matrix id{};
  for (int k = 0; k < 3; ++k) id[k][k] = 1.0;
  const QuadraticFormValues two = quadratic_form_identity(id, direction_set(2));
  EXPECT_NEAR(two.lhs, 4.0, 1e-14);
  EXPECT_NEAR(two.rhs, 4.0, 1e-14);
  const QuadraticFormValues three = quadratic_form_identity(id, direction_set(3));
  EXPECT_NEAR(three.lhs, 7.5, 1e-14);
  EXPECT_NEAR(three.rhs, 7.5, 1e-14);
}

TEST(QuadraticForm, DefaultWeightsReproduceElasticDensity) {
  std::mt19937_64 rng(2024);
  for (int dim : {2, 3}) {
    const DirectionSet s = direction_set(dim);
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix m = oracle::random_symmetric(rng, dim);
      const double lhs = direct_lhs(m, dim, s.sigma_1, s.sigma_sqrt2, s.sigma_sqrt3);
      const double tr = trace(m, dim);
      const double target = frobenius_sq(m, dim) + 0.5 * tr * tr;
      EXPECT_LE(std::abs(lhs - target), 1e-12 * (1.0 + target));
      const QuadraticFormValues q = quadratic_form_identity(m, s);
      EXPECT_LE(std::abs(q.lhs - lhs), 1e-12 * (1.0 + lhs));
      EXPECT_LE(std::abs(q.rhs - target), 1e-12 * (1.0 + target));
    }
  }
}

TEST(QuadraticForm, ClosedFormHoldsForRandomWeights) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> w(0.05, 3.0);
  for (int dim : {2, 3}) {
    for (int trial = 0; trial < 100; ++trial) {
      const double s1 = w(rng), s2 = w(rng), s3 = dim == 3 ? w(rng) : 0.0;
      const DirectionSet s = direction_set(dim).with_weights(s1, s2, s3);
      const Matrix m = oracle::random_symmetric(rng, dim);
      const QuadraticFormValues q = quadratic_form_identity(m, s);
      const double lhs = direct_lhs(m, dim, s1, s2, s3);
      EXPECT_LE(std::abs(q.lhs - lhs), 1e-12 * (1.0 + lhs));
      EXPECT_LE(std::abs(q.lhs - q.rhs), 1e-12 * (1.0 + std::abs(q.rhs)));
      const LatticeCoefficients c = lattice_coefficients(s);
      EXPECT_GE(lhs, std::min(c.c1, c.c2) * frobenius_sq(m, dim) * (1.0 - 1e-12));
    }
  }
}

TEST(QuadraticForm, RejectsNonSymmetricMatrix) {
  Matrix m{};
  m[0][1] = 1.0;
  EXPECT_THROW(quadratic_form_identity(m, direction_set(2)), std::invalid_argument);
}
