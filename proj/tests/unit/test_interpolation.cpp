#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "latfrac/energy.hpp"
#include "latfrac/interpolation.hpp"
#include "latfrac/quadrature.hpp"
#include "oracles.hpp"

using namespace latfrac;

namespace {

// Rank of a set of symmetric matrices {v (x) v}, viewed as vectors of upper-triangle entries.
int sym_outer_rank(const std::vector<LatticeVector>& vs, int dim) {
  std::vector<std::vector<double>> rows;
  for (const auto& v : vs) {
    std::vector<double> r;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) r.push_back(static_cast<double>(v[i] * v[j]));
    rows.push_back(r);
  }
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < rows.size() && std::abs(rows[piv][c]) < 1e-12) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[static_cast<std::size_t>(rank)]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == static_cast<std::size_t>(rank)) continue;
      const double f = rows[r][c] / rows[static_cast<std::size_t>(rank)][c];
      for (std::size_t k = 0; k < cols; ++k) rows[r][k] -= f * rows[static_cast<std::size_t>(rank)][k];
    }
    ++rank;
  }
  return rank;
}

Point random_point_in(std::mt19937_64& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) p[k] = dist(rng);
  return p;
}

}  // namespace

TEST(Freudenthal, TwoDimensionalList) {
  const auto s = freudenthal(2);
  ASSERT_EQ(s.size(), 2u);
  const std::vector<LatticeVector> t1{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
  const std::vector<LatticeVector> t2{{0, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  EXPECT_EQ(s[0].vertices, t1);
  EXPECT_EQ(s[1].vertices, t2);
}

TEST(Freudenthal, SimplicesAreUnitChainsOfEqualVolume) {
  for (int dim : {2, 3}) {
    const auto s = freudenthal(dim);
    const long long fact = dim == 2 ? 2 : 6;
    ASSERT_EQ(static_cast<long long>(s.size()), fact);
    long long total = 0;
    for (const auto& t : s) {
      EXPECT_EQ(t.volume_times_factorial(), 1);
      total += t.volume_times_factorial();
      ASSERT_EQ(t.vertices.size(), static_cast<std::size_t>(dim + 1));
      EXPECT_EQ(t.edges.size(), static_cast<std::size_t>(dim * (dim + 1) / 2));
      EXPECT_EQ(sym_outer_rank(t.edges, dim), dim * (dim + 1) / 2);
      LatticeVector last{1, 1, dim == 3 ? 1 : 0};
      EXPECT_EQ(t.vertices.back(), last);
      for (std::size_t k = 1; k < t.vertices.size(); ++k) {
        int diff = 0;
        for (int a = 0; a < dim; ++a) diff += t.vertices[k][a] - t.vertices[k - 1][a];
        EXPECT_EQ(diff, 1);
      }
    }
    EXPECT_EQ(total, fact);  // sum of volumes = total / d! = 1
  }
  EXPECT_THROW(freudenthal(4), std::invalid_argument);
}

TEST(Freudenthal, RandomPointsAreCoveredExactlyOnce) {
  std::mt19937_64 rng(2);
  for (int dim : {2, 3}) {
    const auto s = freudenthal(dim);
    int uncovered = 0, multiple = 0;
    for (int i = 0; i < 10000; ++i) {
      const Point t = random_point_in(rng, dim, 0.0, 1.0);
      int hits = 0;
      for (const auto& simplex : s) hits += simplex.contains(t) ? 1 : 0;
      uncovered += hits == 0;
      multiple += hits > 1;
      const auto b = s[locate_simplex(dim, t)].barycentric(t);
      double sum = 0.0;
      for (int k = 0; k <= dim; ++k) {
        EXPECT_GE(b[k], -1e-15);
        sum += b[k];
      }
      EXPECT_NEAR(sum, 1.0, 1e-15);
    }
    EXPECT_EQ(uncovered, 0);
    EXPECT_EQ(multiple, 0);
  }
  EXPECT_THROW(locate_simplex(2, {1.5, 0.2, 0.0}), std::out_of_range);
}

TEST(PiecewiseAffine, ReproducesAffineFields) {
  std::mt19937_64 rng(6);
  for (int dim : {2, 3}) {
    const DomainPtr d = build_domain(Box::unit(dim), 0.125);
    const Matrix a = oracle::random_symmetric(rng, dim);
    const VectorFunction f = oracle::affine(a, dim, {0.1, 0.2, 0.3});
    const PiecewiseAffine pa(VectorField::sample(d, f));
    for (int i = 0; i < 100; ++i) {
      const Point x = random_point_in(rng, dim, 0.0, 1.0);
      const Point got = pa.vector_value(x);
      const Point want = f(x);
      for (int k = 0; k < dim; ++k) EXPECT_NEAR(got[k], want[k], 1e-13);
      const Matrix j = pa.jacobian(x);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) EXPECT_NEAR(j[r][c], a[r][c], 1e-12);
    }
  }
}

TEST(PiecewiseAffine, NodalIndicatorAndReinterpolation) {
  std::mt19937_64 rng(9);
  const DomainPtr d = build_domain(Box::unit(2), 0.25);
  ScalarField e = ScalarField::constant(d, 0.0);
  e[12] = 1.0;
  const PiecewiseAffine pe(e);
  for (std::size_t n = 0; n < d->node_count(); ++n) EXPECT_EQ(pe.value(d->position(n)), n == 12 ? 1.0 : 0.0);

  const ScalarField r = oracle::random_scalar(d, rng);
  const PiecewiseAffine pr(r);
  const ScalarField again = ScalarField::sample(d, [&](const Point& x) { return pr.value(x); });
  for (std::size_t n = 0; n < d->node_count(); ++n) EXPECT_NEAR(again[n], r[n], 1e-15);
  const PiecewiseAffine twice(again);
  for (int i = 0; i < 50; ++i) {
    const Point x = random_point_in(rng, 2, 0.0, 1.0);
    EXPECT_NEAR(twice.value(x), pr.value(x), 1e-14);
  }
  EXPECT_THROW(pr.value({1.2, 0.5, 0.0}), std::out_of_range);
  EXPECT_THROW(pr.value({0.5, 0.5, 0.0}, 1), std::out_of_range);
}

TEST(PiecewiseAffine, ValuesStayWithinCornerRange) {
  std::mt19937_64 rng(10);
  const DomainPtr d = build_domain(Box::unit(3), 0.25);
  const ScalarField v = oracle::random_scalar(d, rng);
  const PiecewiseAffine pa(v);
  const CellField cells = vmin_cell(v);
  for (int i = 0; i < 500; ++i) {
    const Point x = random_point_in(rng, 3, 0.0, 0.999);
    MultiIndex m{};
    for (int k = 0; k < 3; ++k) m[k] = static_cast<std::size_t>(std::floor(x[k] / 0.25));
    const std::size_t base = d->flat(m);
    double hi = 0.0;
    for (int c = 0; c < 8; ++c) hi = std::max(hi, v[d->shifted(base, {c & 1, (c >> 1) & 1, (c >> 2) & 1})]);
    ASSERT_TRUE(cells.valid[base]);
    EXPECT_GE(pa.value(x), cells.values[base] - 1e-15);
    EXPECT_LE(pa.value(x), hi + 1e-15);
  }
}

TEST(PiecewiseAffine, EdgeIdentityOnRandomFields) {
  std::mt19937_64 rng(14);
  for (int dim : {2, 3}) {
    const double delta = 0.25;
    const DomainPtr d = build_domain(Box::unit(dim), delta);
    const VectorField u = oracle::random_vector(d, rng);
    const PiecewiseAffine pa(u);
    const auto simplices = freudenthal(dim);
    for (int trial = 0; trial < 20; ++trial) {
      MultiIndex cell{};
      for (int k = 0; k < dim; ++k) cell[k] = std::uniform_int_distribution<std::size_t>(0, d->extents()[k] - 2)(rng);
      const std::size_t base = d->flat(cell);
      for (const auto& t : simplices) {
        Point inner{};
        for (int k = 0; k <= dim; ++k)
          for (int a = 0; a < dim; ++a) inner[a] += t.vertices[static_cast<std::size_t>(k)][a] / (dim + 1.0);
        Point x = d->position(base);
        for (int a = 0; a < dim; ++a) x[a] += delta * inner[a];
        const Matrix e = symmetric_part(pa.jacobian(x), dim);
        for (std::size_t i = 0; i < t.vertices.size(); ++i)
          for (std::size_t j = i + 1; j < t.vertices.size(); ++j) {
            LatticeVector nu{};
            for (int a = 0; a < dim; ++a) nu[a] = t.vertices[j][a] - t.vertices[i][a];
            double enn = 0.0;
            for (int r = 0; r < dim; ++r)
              for (int c = 0; c < dim; ++c) enn += e[r][c] * nu[r] * nu[c];
            enn /= squared_length(nu);
            const std::size_t from = d->shifted(base, t.vertices[i]);
            const std::size_t to = d->shifted(base, t.vertices[j]);
            double proj = 0.0;
            for (int a = 0; a < dim; ++a) proj += (u(to, a) - u(from, a)) * nu[a];
            EXPECT_NEAR(enn, proj / (delta * squared_length(nu)), 1e-12);
          }
      }
    }
  }
}

TEST(VminCell, ConstantCornerZeroAndOracle) {
  std::mt19937_64 rng(21);
  const DomainPtr d = build_domain(Box::unit(2), 0.25);
  const CellField c = vmin_cell(ScalarField::constant(d, 0.7));
  std::size_t valid = 0;
  for (std::size_t n = 0; n < d->node_count(); ++n)
    if (c.valid[n]) {
      ++valid;
      EXPECT_EQ(c.values[n], 0.7);
    }
  EXPECT_EQ(valid, 16u);

  ScalarField one = ScalarField::constant(d, 1.0);
  one[d->flat({2, 2, 0})] = 0.0;
  const CellField z = vmin_cell(one);
  EXPECT_EQ(z.values[d->flat({1, 1, 0})], 0.0);
  EXPECT_EQ(z.values[d->flat({2, 2, 0})], 0.0);
  EXPECT_EQ(z.values[d->flat({0, 0, 0})], 1.0);

  const ScalarField r = oracle::random_scalar(d, rng);
  const CellField rc = vmin_cell(r);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double m = std::min({r[d->flat({i, j, 0})], r[d->flat({i + 1, j, 0})], r[d->flat({i, j + 1, 0})],
                                 r[d->flat({i + 1, j + 1, 0})]});
      EXPECT_EQ(rc.values[d->flat({i, j, 0})], m);
    }

  const DomainPtr holed = build_domain(Box::unit(2), 0.25, {}, [](const Point& x) { return x[0] + x[1] > 0.1; });
  EXPECT_EQ(vmin_cell(ScalarField::constant(holed, 1.0)).skipped, 1u);
}

TEST(Translate, CellShiftsLeaveNodalValues) {
  std::mt19937_64 rng(3);
  const DomainPtr d = build_domain(Box::unit(2), 0.25);
  const ScalarField v = oracle::random_scalar(d, rng);
  const VectorField u = oracle::random_vector(d, rng);
  const Point y{0.5, 0.25, 0.0};
  const ScalarField ty = translate(v, y);
  const ScalarField composed = translate(translate(v, {}), y);
  for (std::size_t n = 0; n < d->node_count(); ++n) {
    EXPECT_EQ(translate(v, {})[n], v[n]);
    EXPECT_EQ(ty[n], composed[n]);
  }
  EXPECT_EQ(translate(u, y).values()[5], u.values()[5]);
  EXPECT_THROW(translate(v, {1.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(translate(u, {-0.1, 0.0, 0.0}), std::invalid_argument);

  const ScalarField s = sample_translated(d, [](const Point& x) { return x[0] + 10.0 * x[1]; }, y);
  EXPECT_NEAR(s[d->flat({1, 2, 0})], (0.25 + 0.125) + 10.0 * (0.5 + 0.0625), 1e-14);
}

TEST(Translate, AveragedEnergyBoundedByContinuumIntegral) {
  // Mean over a grid of shifts y of F(T_y u, 1) against the density integral over the box the samples reach.
  const double delta = 1.0 / 32;
  const DomainPtr d = build_domain(Box::unit(2), delta);
  const VectorFunction u = [](const Point& x) {
    return Point{std::sin(2.0 * x[0]) * x[1], std::cos(x[0] + x[1]), 0.0};
  };
  const auto density = [](double x, double y) {
    const double u11 = 2.0 * std::cos(2.0 * x) * y, u12 = std::sin(2.0 * x);
    const double u21 = -std::sin(x + y), u22 = -std::sin(x + y);
    const double e12 = 0.5 * (u12 + u21);
    const double tr = u11 + u22;
    return u11 * u11 + u22 * u22 + 2.0 * e12 * e12 + 0.5 * tr * tr;
  };
  const double rhs = adaptive_simpson(
      [&](double y) { return adaptive_simpson([&](double x) { return density(x, y); }, 0.0, 1.0 + delta, 1e-11); },
      0.0, 1.0 + delta, 1e-10);
  const ScalarField one = ScalarField::constant(d, 1.0);
  double mean = 0.0;
  constexpr int kShifts = 8;
  for (int i = 0; i < kShifts; ++i)
    for (int j = 0; j < kShifts; ++j)
      mean += elastic_energy(sample_translated(d, u, {(i + 0.5) / kShifts, (j + 0.5) / kShifts, 0.0}), one,
                             direction_set(2)) /
              (kShifts * kShifts);
  EXPECT_LE(mean, rhs);
  EXPECT_GE(mean, 0.8 * rhs);
}

TEST(HatInterpolant, ExamplesAndSliceOracle) {
  const double delta = 0.25;
  const HatInterpolant1D c = pc_to_affine_1d({2.0, 2.0, 2.0}, delta);
  EXPECT_EQ(c(0.3), 2.0);
  const HatInterpolant1D s = pc_to_affine_1d({0.0, 1.0}, delta);
  EXPECT_DOUBLE_EQ(s.slope(0.1), 1.0 / delta);
  EXPECT_DOUBLE_EQ(s(0.125), 0.5);
  EXPECT_DOUBLE_EQ(s.length(), delta);
  EXPECT_THROW(pc_to_affine_1d({1.0}, delta), std::invalid_argument);
  EXPECT_THROW(s(0.3), std::out_of_range);

  std::mt19937_64 rng(15);
  const DomainPtr d = build_domain(Box::unit(2), delta);
  const ScalarField v = oracle::random_scalar(d, rng);
  const PiecewiseAffine pa(v);
  for (std::size_t row = 0; row < 5; ++row) {
    std::vector<double> line;
    for (std::size_t j = 0; j < 5; ++j) line.push_back(v[d->flat({row, j, 0})]);
    const HatInterpolant1D h = pc_to_affine_1d(line, delta);
    for (int i = 0; i < 20; ++i) {
      const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      EXPECT_NEAR(h(t), pa.value({row * delta, t, 0.0}), 1e-14);
    }
  }
}
