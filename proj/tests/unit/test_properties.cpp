#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "latfrac/energy.hpp"
#include "latfrac/interpolation.hpp"
#include "oracles.hpp"

using namespace latfrac;

namespace {

// Random instance generator: box dimension, side lengths, spacing and fields.
struct Instance {
  DomainPtr domain;
  VectorField u;
  ScalarField v;
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  Instance next() {
    const int dim = std::uniform_int_distribution<int>(2, 3)(rng_);
    const double delta = dim == 2 ? 0.125 : 0.25;
    Box b = Box::unit(dim);
    for (int k = 0; k < dim; ++k) b.lengths[k] = delta * std::uniform_int_distribution<int>(2, dim == 2 ? 9 : 5)(rng_);
    const DomainPtr d = build_domain(b, delta);
    const double scale = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng_));
    return {d, oracle::random_vector(d, rng_, -scale, scale), oracle::random_scalar(d, rng_)};
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

constexpr int kCases = 60;

VectorField plus_rigid(const VectorField& u, Gen& g) {
  const int dim = u.dim();
  Matrix w{};
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      w[i][j] = g.uniform(-2.0, 2.0);
      w[j][i] = -w[i][j];
    }
  const VectorFunction rigid = oracle::affine(w, dim, {g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)});
  VectorField out = u;
  for (std::size_t n = 0; n < u.node_count(); ++n) {
    const Point r = rigid(u.domain().position(n));
    for (int k = 0; k < dim; ++k) out(n, k) += r[k];
  }
  return out;
}

// Reflection x_0 -> L_0 - x_0 of both the node index and the first displacement component.
template <class F>
F mirrored(const F& f);

template <>
VectorField mirrored(const VectorField& u) {
  const LatticeDomain& d = u.domain();
  VectorField out = u;
  for (std::size_t n = 0; n < d.node_count(); ++n) {
    MultiIndex m = d.multi(n);
    m[0] = d.extents()[0] - 1 - m[0];
    const std::size_t img = d.flat(m);
    for (int k = 0; k < d.dim(); ++k) out(img, k) = k == 0 ? -u(n, k) : u(n, k);
  }
  return out;
}

template <>
ScalarField mirrored(const ScalarField& v) {
  const LatticeDomain& d = v.domain();
  ScalarField out = v;
  for (std::size_t n = 0; n < d.node_count(); ++n) {
    MultiIndex m = d.multi(n);
    m[0] = d.extents()[0] - 1 - m[0];
    out[d.flat(m)] = v[n];
  }
  return out;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST(Properties, EnergiesAreFiniteAndNonnegative) {
  Gen g(101);
  for (int i = 0; i < kCases; ++i) {
    const Instance in = g.next();
    const DirectionSet s = direction_set(in.domain->dim());
    for (double e : {elastic_energy(in.u, in.v, s), divergence_energy(in.u, in.v), divergence_energy_ni(in.u, in.v),
                     phase_field_energy(in.v, g.uniform(0.01, 1.0))}) {
      EXPECT_TRUE(std::isfinite(e));
      EXPECT_GE(e, 0.0);
    }
  }
}

TEST(Properties, RigidMotionsDoNotChangeBulkTerms) {
  Gen g(202);
  for (int i = 0; i < kCases; ++i) {
    const Instance in = g.next();
    const VectorField moved = plus_rigid(in.u, g);
    const DirectionSet s = direction_set(in.domain->dim());
    const double ref = elastic_energy(in.u, in.v, s);
    EXPECT_NEAR(elastic_energy(moved, in.v, s), ref, 1e-10 * (1.0 + ref));
    const double div = divergence_energy(in.u, in.v);
    EXPECT_NEAR(divergence_energy(moved, in.v), div, 1e-10 * (1.0 + div));
  }
}

TEST(Properties, NiEnergyIsBracketed) {
  Gen g(303);
  for (int i = 0; i < kCases; ++i) {
    const Instance in = g.next();
    const ScalarField one = ScalarField::constant(in.domain, 1.0);
    const double lo = divergence_energy(in.u, in.v);
    const double mid = divergence_energy_ni(in.u, in.v);
    const double hi = divergence_energy(in.u, one);
    EXPECT_LE(lo, mid * (1.0 + 1e-14));
    EXPECT_LE(mid, hi * (1.0 + 1e-14));
    EXPECT_LE(rel_gap(divergence_energy_ni(in.u, one), hi), 1e-14);
  }
}

TEST(Properties, PlainEnergyIsEvenInDisplacement) {
  Gen g(404);
  for (int i = 0; i < kCases; ++i) {
    const Instance in = g.next();
    VectorField neg = in.u;
    for (double& x : neg.values()) x = -x;
    EnergyParams p;
    p.delta = in.domain->spacing();
    EXPECT_EQ(*total_energy(neg, in.v, p).total, *total_energy(in.u, in.v, p).total);
  }
}

TEST(Properties, ReflectionInvariance) {
  Gen g(505);
  for (int i = 0; i < kCases; ++i) {
    const Instance in = g.next();
    const VectorField mu = mirrored(in.u);
    const ScalarField mv = mirrored(in.v);
    const DirectionSet s = direction_set(in.domain->dim());
    EXPECT_LE(rel_gap(elastic_energy(mu, mv, s), elastic_energy(in.u, in.v, s)), 1e-12);
    EXPECT_LE(rel_gap(divergence_energy(mu, mv), divergence_energy(in.u, in.v)), 1e-12);
    EXPECT_LE(rel_gap(divergence_energy_ni(mu, mv), divergence_energy_ni(in.u, in.v)), 1e-12);
    EXPECT_LE(rel_gap(phase_field_energy(mv, 0.3), phase_field_energy(in.v, 0.3)), 1e-12);
  }
}

TEST(Properties, DeterministicReductionAcrossThreadCounts) {
  Gen g(606);
  for (int i = 0; i < 20; ++i) {
    const Instance in = g.next();
    EnergyParams p;
    p.delta = in.domain->spacing();
    const double ref = *total_energy(in.u, in.v, p, nullptr, {1, true}).total;
    for (int threads : {2, 5}) EXPECT_EQ(*total_energy(in.u, in.v, p, nullptr, {threads, true}).total, ref);
  }
}

TEST(Properties, InterpolantMatchesNodesOnRandomBoxes) {
  Gen g(707);
  for (int i = 0; i < 20; ++i) {
    const Instance in = g.next();
    const PiecewiseAffine pa(in.u);
    for (std::size_t n = 0; n < in.domain->node_count(); ++n) {
      const Point x = pa.vector_value(in.domain->position(n));
      for (int k = 0; k < in.domain->dim(); ++k) EXPECT_NEAR(x[k], in.u(n, k), 1e-12 * (1.0 + std::abs(in.u(n, k))));
    }
  }
}
