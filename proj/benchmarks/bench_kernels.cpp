#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "latfrac/energy.hpp"
#include "latfrac/griffith.hpp"
#include "latfrac/operators.hpp"
#include "latfrac/recovery.hpp"
#include "latfrac/solver.hpp"

using namespace latfrac;

namespace {

struct Fields {
  DomainPtr domain;
  VectorField u;
  ScalarField v;
};

Fields random_fields(int dim, int per_axis) {
  const DomainPtr d = build_domain(Box::unit(dim), 1.0 / per_axis);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorField u = VectorField::zero(d);
  ScalarField v = ScalarField::constant(d, 1.0);
  for (double& x : u.values()) x = dist(rng);
  for (double& x : v.values()) x = 0.5 * (1.0 + dist(rng));
  return {d, std::move(u), std::move(v)};
}

void BM_TotalEnergy2D(benchmark::State& state) {
  const Fields f = random_fields(2, static_cast<int>(state.range(0)));
  EnergyParams p;
  p.delta = f.domain->spacing();
  for (auto _ : state) benchmark::DoNotOptimize(total_energy(f.u, f.v, p));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(f.domain->node_count()));
}
BENCHMARK(BM_TotalEnergy2D)->Arg(64)->Arg(128)->Arg(256);

void BM_TotalEnergy3D(benchmark::State& state) {
  const Fields f = random_fields(3, static_cast<int>(state.range(0)));
  EnergyParams p;
  p.delta = f.domain->spacing();
  for (auto _ : state) benchmark::DoNotOptimize(total_energy(f.u, f.v, p));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(f.domain->node_count()));
}
BENCHMARK(BM_TotalEnergy3D)->Arg(16)->Arg(32);

void BM_DivergenceSplit(benchmark::State& state) {
  const Fields f = random_fields(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(divergence_energy_ni(f.u, f.v));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(f.domain->node_count()));
}
BENCHMARK(BM_DivergenceSplit)->Arg(128);

void BM_SymPairSweep(benchmark::State& state) {
  const Fields f = random_fields(2, static_cast<int>(state.range(0)));
  const auto nodes = range_nodes(*f.domain, {1, 1, 0});
  for (auto _ : state) {
    double sum = 0.0;
    for (std::size_t n : nodes) sum += sym_pair_sq(f.u, n, {1, 1, 0});
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(nodes.size()));
}
BENCHMARK(BM_SymPairSweep)->Arg(256);

void BM_BuildRecovery(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  const GriffithReference target = GriffithReference::planar_jump(Box::unit(2), 0.5, {0.0, 1.0, 0.0});
  EnergyParams p;
  p.eps = eps;
  p.delta = eps * eps;
  const DomainPtr d = build_domain(Box::unit(2), p.delta);
  RecoveryOptions options;
  options.allow_boundary_crack = true;
  for (auto _ : state) benchmark::DoNotOptimize(build_recovery(target, d, p, options));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(d->node_count()));
}
BENCHMARK(BM_BuildRecovery)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_MinimizeU(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DomainPtr d = build_domain(Box::unit(2), 1.0 / n, DirichletSpec::opposite_faces(0));
  const VectorFunction datum = [](const Point& x) { return Point{x[0] < 0.5 ? -0.1 : 0.1, 0.0, 0.0}; };
  EnergyParams p;
  p.delta = d->spacing();
  p.variant = Variant::dirichlet;
  const VectorField u0 = default_displacement(d, &datum);
  const ScalarField v = ScalarField::constant(d, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(minimize_u(u0, v, p, {}, &datum));
}
BENCHMARK(BM_MinimizeU)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
