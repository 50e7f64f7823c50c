#include "latfrac/harness/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "latfrac/energy.hpp"
#include "latfrac/interpolation.hpp"
#include "latfrac/recovery.hpp"
#include "latfrac/solver.hpp"

namespace latfrac::harness {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

Matrix random_symmetric(Rng& rng, int dim) {
  Matrix m{};
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) m[i][j] = m[j][i] = uniform(rng, -1.0, 1.0);
  return m;
}

struct Outcome {
  bool passed = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << what << "; ";
    }
  }
};

Outcome suite_matrix1(Rng& rng) {
  Outcome out;
  double worst_default = 0.0, worst_random = 0.0;
  for (int dim : {2, 3}) {
    const DirectionSet base = direction_set(dim);
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix m = random_symmetric(rng, dim);
      const double tr = trace(m, dim);
      const double expected = frobenius_sq(m, dim) + 0.5 * tr * tr;
      worst_default = std::max(worst_default, rel_err(quadratic_form_identity(m, base).lhs, expected));
      const DirectionSet sigma = base.with_weights(uniform(rng, 0.1, 2.0), uniform(rng, 0.1, 2.0),
                                                   dim == 3 ? uniform(rng, 0.1, 2.0) : 0.0);
      const QuadraticFormValues q = quadratic_form_identity(m, sigma);
      worst_random = std::max(worst_random, rel_err(q.lhs, q.rhs));
    }
  }
  out.check(worst_default <= 1e-12, "default weights deviate");
  out.check(worst_random <= 1e-12, "closed-form coefficients deviate");
  out.detail << "max rel err default " << worst_default << ", random weights " << worst_random;
  return out;
}

DomainPtr small_domain(int dim, int nodes_per_axis) {
  const double delta = 1.0 / (nodes_per_axis - 1);
  return build_domain(Box::unit(dim), delta);
}

VectorField random_vector_field(const DomainPtr& domain, Rng& rng) {
  VectorField u = VectorField::zero(domain);
  for (double& x : u.values()) x = uniform(rng, -1.0, 1.0);
  return u;
}

Outcome suite_split(Rng& rng) {
  Outcome out;
  double worst = 0.0;
  for (int dim : {2, 3}) {
    const DomainPtr domain = small_domain(dim, dim == 2 ? 7 : 5);
    const ScalarField one = ScalarField::constant(domain, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const VectorField u = random_vector_field(domain, rng);
      worst = std::max(worst, rel_err(divergence_energy_ni(u, one), divergence_energy(u, one)));
    }
  }
  out.check(worst <= 1e-14, "split identity deviates");
  out.detail << "max rel err " << worst;
  return out;
}

long long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

Outcome suite_freudenthal(Rng& rng) {
  Outcome out;
  double worst_edge = 0.0;
  for (int dim : {2, 3}) {
    const auto simplices = freudenthal(dim);
    out.check(static_cast<long long>(simplices.size()) == factorial(dim), "wrong simplex count");
    long long volume = 0;
    for (const auto& s : simplices) {
      out.check(s.volume_times_factorial() == 1, "simplex volume is not 1/d!");
      volume += s.volume_times_factorial();
    }
    out.check(volume == factorial(dim), "volumes do not add up to the unit cube");

    int uncovered = 0;
    for (int i = 0; i < 10000; ++i) {
      Point t{0.0, 0.0, 0.0};
      for (int k = 0; k < dim; ++k) t[k] = uniform(rng, 0.0, 1.0);
      try {
        const std::size_t idx = locate_simplex(dim, t);
        if (!simplices[idx].contains(t, 1e-12)) ++uncovered;
      } catch (const std::out_of_range&) {
        ++uncovered;
      }
    }
    out.check(uncovered == 0, std::to_string(uncovered) + " uncovered points in d=" + std::to_string(dim));

    const DomainPtr domain = small_domain(dim, 4);
    const VectorField u = random_vector_field(domain, rng);
    const PiecewiseAffine interp(u);
    const double h = domain->spacing();
    for (std::size_t node = 0; node < domain->node_count(); ++node) {
      const MultiIndex idx = domain->multi(node);
      bool interior = true;
      for (int k = 0; k < dim; ++k) interior = interior && idx[k] + 1 < domain->extents()[k];
      if (!interior) continue;
      for (const auto& s : simplices) {
        Point centroid = domain->position(node);
        for (const auto& vtx : s.vertices)
          for (int k = 0; k < dim; ++k) centroid[k] += h * vtx[k] / (dim + 1);
        const Matrix strain = symmetric_part(interp.jacobian(centroid), dim);
        for (std::size_t i = 0; i < s.vertices.size(); ++i)
          for (std::size_t j = i + 1; j < s.vertices.size(); ++j) {
            LatticeVector e{};
            for (int k = 0; k < kMaxDim; ++k) e[k] = s.vertices[j][k] - s.vertices[i][k];
            const double len = std::sqrt(static_cast<double>(squared_length(e)));
            Point nu{};
            for (int k = 0; k < dim; ++k) nu[k] = e[k] / len;
            double lhs = 0.0;
            for (int a = 0; a < dim; ++a)
              for (int b = 0; b < dim; ++b) lhs += strain[a][b] * nu[a] * nu[b];
            const std::size_t ni = domain->shifted(node, s.vertices[i]);
            const std::size_t nj = domain->shifted(node, s.vertices[j]);
            double rhs = 0.0;
            for (int k = 0; k < dim; ++k) rhs += (u(nj, k) - u(ni, k)) * nu[k];
            rhs /= h * len;
            worst_edge = std::max(worst_edge, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
          }
      }
    }
  }
  out.check(worst_edge <= 1e-12, "edge identity deviates");
  out.detail << "max edge identity err " << worst_edge;
  return out;
}

Outcome suite_profile() {
  Outcome out;
  const OptimalProfile p = build_profile(0.1);
  out.check(p.integral() > 1.0 && p.integral() <= 1.1, "profile integral outside (1, 1.1]");
  out.check(p(0.0) == 0.0 && p(p.support()) == 1.0, "profile end values");
  out.detail << "certified integral " << p.integral() << " on [0, " << p.support() << "]";
  return out;
}

Outcome suite_monotone(Rng& rng) {
  Outcome out;
  double worst_increase = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    Box bar = Box::unit(2);
    bar.lengths = {1.0, 0.5, 0.0};
    const double delta = 1.0 / 16.0;
    const DomainPtr domain = build_domain(bar, delta, DirichletSpec::opposite_faces(0));
    const double stretch = uniform(rng, 0.05, 1.5);
    const VectorFunction datum = [stretch](const Point& x) {
      return Point{x[0] < 0.5 ? -0.5 * stretch : 0.5 * stretch, 0.0, 0.0};
    };
    EnergyParams params;
    params.eps = uniform(rng, 0.15, 0.3);
    params.delta = delta;
    params.variant = Variant::dirichlet;
    VectorField u0 = default_displacement(domain, &datum);
    for (std::size_t n = 0; n < domain->node_count(); ++n)
      if (!domain->dirichlet(n))
        for (int k = 0; k < 2; ++k) u0(n, k) += uniform(rng, -0.1, 0.1);
    SolverConfig config;
    config.max_outer_iterations = 20;
    const SolveResult r = alternate_minimize(u0, ScalarField::constant(domain, 1.0), params, config, &datum);
    for (std::size_t i = 1; i < r.report.substep_totals.size(); ++i)
      worst_increase = std::max(worst_increase, r.report.substep_totals[i] - r.report.substep_totals[i - 1]);
    if (!r.report.substep_totals.empty())
      worst_increase = std::max(worst_increase, r.report.substep_totals.front() - *r.report.trace.front().total);
    out.check(r.report.trace.back().admissible(), "final state violates the Dirichlet constraint");
  }
  out.check(worst_increase <= 1e-12, "energy increased");
  out.detail << "max substep increase " << worst_increase;
  return out;
}

// Independent reference sums over an explicit index loop on the unit box lattice.
struct NaiveGrid {
  int dim;
  int n;  ///< nodes per axis
  double h;
  std::size_t index(const std::array<int, 3>& i) const {
    std::size_t f = 0;
    for (int k = 0; k < dim; ++k) f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(i[k]);
    return f;
  }
  bool inside(const std::array<int, 3>& i) const {
    for (int k = 0; k < dim; ++k)
      if (i[k] < 0 || i[k] >= n) return false;
    return true;
  }
  void for_each(const std::function<void(const std::array<int, 3>&)>& body) const {
    std::array<int, 3> i{0, 0, 0};
    const int total = dim == 2 ? n * n : n * n * n;
    for (int f = 0; f < total; ++f) {
      int rest = f;
      for (int k = dim - 1; k >= 0; --k) {
        i[k] = rest % n;
        rest /= n;
      }
      body(i);
    }
  }
};

double naive_elastic_direction(const NaiveGrid& g, const std::vector<double>& u,
                               const std::vector<double>& v, const LatticeVector& xi) {
  const double len_sq = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
  double sum = 0.0;
  g.for_each([&](const std::array<int, 3>& a) {
    std::array<int, 3> fwd = a, bwd = a;
    for (int k = 0; k < g.dim; ++k) {
      fwd[k] += xi[k];
      bwd[k] -= xi[k];
    }
    if (!g.inside(fwd) || !g.inside(bwd)) return;
    double dp = 0.0, dm = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      const auto comp = static_cast<std::size_t>(k);
      const auto d = static_cast<std::size_t>(g.dim);
      dp += (u[g.index(fwd) * d + comp] - u[g.index(a) * d + comp]) * xi[k] / len_sq;
      dm += (u[g.index(bwd) * d + comp] - u[g.index(a) * d + comp]) * (-xi[k]) / len_sq;
    }
    const double va = v[g.index(a)];
    sum += va * va * (dp * dp + dm * dm);
  });
  return 0.5 * std::pow(g.h, g.dim - 2) * sum;
}

double naive_divergence(const NaiveGrid& g, const std::vector<double>& u, const std::vector<double>& v) {
  double sum = 0.0;
  const auto d = static_cast<std::size_t>(g.dim);
  g.for_each([&](const std::array<int, 3>& a) {
    for (int k = 0; k < g.dim; ++k) {
      std::array<int, 3> p = a, m = a;
      ++p[k];
      --m[k];
      if (!g.inside(p) || !g.inside(m)) return;
    }
    const int patterns = 1 << g.dim;
    double node_sum = 0.0;
    for (int s = 0; s < patterns; ++s) {
      double div = 0.0;
      for (int k = 0; k < g.dim; ++k) {
        const int sign = (s >> k) & 1 ? 1 : -1;
        std::array<int, 3> b = a;
        b[k] += sign;
        div += sign * (u[g.index(b) * d + static_cast<std::size_t>(k)] -
                       u[g.index(a) * d + static_cast<std::size_t>(k)]);
      }
      node_sum += div * div;
    }
    const double va = v[g.index(a)];
    sum += va * va * node_sum;
  });
  return std::pow(g.h, g.dim - 2) * sum / (1 << g.dim);
}

double naive_phase_field(const NaiveGrid& g, const std::vector<double>& v, double eps) {
  double sum = 0.0;
  g.for_each([&](const std::array<int, 3>& a) {
    const double va = v[g.index(a)];
    double term = (va - 1.0) * (va - 1.0) / eps;
    for (int k = 0; k < g.dim; ++k) {
      std::array<int, 3> b = a;
      ++b[k];
      if (!g.inside(b)) continue;
      const double q = (v[g.index(b)] - va) / g.h;
      term += eps * q * q;
    }
    sum += term;
  });
  return 0.5 * std::pow(g.h, g.dim) * sum;
}

Outcome suite_oracles(Rng& rng) {
  Outcome out;
  double worst = 0.0;
  for (int dim : {2, 3}) {
    const int n = dim == 2 ? 5 : 4;
    const NaiveGrid g{dim, n, 1.0 / (n - 1)};
    const DomainPtr domain = small_domain(dim, n);
    VectorField u = random_vector_field(domain, rng);
    ScalarField v = ScalarField::constant(domain, 0.0);
    for (double& x : v.values()) x = uniform(rng, 0.0, 1.0);
    const std::vector<double> uu(u.values().begin(), u.values().end());
    const std::vector<double> vv(v.values().begin(), v.values().end());
    for (const auto& xi : direction_set(dim).vectors)
      worst = std::max(worst, rel_err(elastic_direction_energy(u, v, xi), naive_elastic_direction(g, uu, vv, xi)));
    worst = std::max(worst, rel_err(divergence_energy(u, v), naive_divergence(g, uu, vv)));
    worst = std::max(worst, rel_err(phase_field_energy(v, 0.3), naive_phase_field(g, vv, 0.3)));
  }
  out.check(worst <= 1e-13, "lattice sums deviate from the naive loops");
  out.detail << "max rel err " << worst;
  return out;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"matrix1", "split", "freudenthal", "profile", "monotone", "oracles"};
  return names;
}

VerifyReport run_verify(const std::vector<std::string>& selectors, std::uint64_t seed) {
  for (const auto& s : selectors)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw std::invalid_argument("unknown verify suite '" + s + "'");
  const std::vector<std::string>& chosen = selectors.empty() ? suite_names() : selectors;

  VerifyReport report;
  for (const auto& name : suite_names()) {
    if (std::find(chosen.begin(), chosen.end(), name) == chosen.end()) continue;
    Rng rng(seed);
    const auto start = std::chrono::steady_clock::now();
    SuiteResult result;
    result.name = name;
    try {
      Outcome o;
      if (name == "matrix1") o = suite_matrix1(rng);
      else if (name == "split") o = suite_split(rng);
      else if (name == "freudenthal") o = suite_freudenthal(rng);
      else if (name == "profile") o = suite_profile();
      else if (name == "monotone") o = suite_monotone(rng);
      else o = suite_oracles(rng);
      result.passed = o.passed;
      result.detail = o.detail.str();
    } catch (const std::exception& e) {
      result.passed = false;
      result.detail = std::string("exception: ") + e.what();
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.suites.push_back(std::move(result));
  }
  return report;
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json j;
  j["passed"] = report.passed();
  j["suites"] = nlohmann::json::array();
  for (const auto& s : report.suites)
    j["suites"].push_back({{"name", s.name}, {"passed", s.passed}, {"detail", s.detail}, {"seconds", s.seconds}});
  return j;
}

}  // namespace latfrac::harness
