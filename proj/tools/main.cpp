// latfrac command-line front end: evaluate, minimize, sweep, verify, recovery.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latfrac/energy.hpp"
#include "latfrac/field_io.hpp"
#include "latfrac/harness/config.hpp"
#include "latfrac/harness/sweep.hpp"
#include "latfrac/harness/verify.hpp"

namespace fs = std::filesystem;
using namespace latfrac;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFailure = 1;

struct Common {
  std::string config;
  std::string out;
  bool deterministic = false;
  int threads = 1;

  ExecPolicy policy() const { return {threads, deterministic}; }
};

fs::path output_dir(const Common& c, const harness::ExperimentConfig* cfg) {
  fs::path dir = !c.out.empty() ? fs::path(c.out) : fs::path(cfg ? cfg->out_dir : ".");
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::string row_tag(std::size_t i) { return "eps" + std::to_string(i); }

int cmd_evaluate(const Common& c, const std::string& u_path, const std::string& v_path,
                 std::optional<double> lambda, std::optional<double> theta, std::optional<double> eps,
                 const std::string& variant, std::optional<double> bound) {
  const FieldFile uf = read_field_file(u_path);
  const FieldFile vf = read_field_file(v_path);
  std::optional<harness::ExperimentConfig> cfg;
  if (!c.config.empty()) cfg = harness::load_config(c.config);

  Box box;
  DirichletSpec dirichlet;
  if (cfg) {
    box = cfg->box;
    dirichlet = cfg->dirichlet;
  } else {
    box = Box::unit(uf.dim);
    for (int k = 0; k < uf.dim; ++k)
      box.lengths[k] = uf.delta * static_cast<double>(uf.extents[static_cast<std::size_t>(k)] - 1);
  }
  const DomainPtr domain = build_domain(box, uf.delta, dirichlet);
  const VectorField u = to_vector_field(uf, domain);
  const ScalarField v = to_scalar_field(vf, domain);

  EnergyParams params;
  if (cfg) params = cfg->params(cfg->eps.empty() ? params.eps : cfg->eps.front());
  params.delta = uf.delta;
  if (lambda) params.lambda = *lambda;
  if (theta) params.theta = *theta;
  if (eps) params.eps = *eps;
  if (!variant.empty()) params.variant = parse_variant(variant);
  if (bound) params.max_displacement = *bound;

  std::optional<VectorFunction> datum;
  if (params.variant == Variant::dirichlet) {
    if (!cfg || cfg->dirichlet.faces.empty())
      throw harness::ConfigError("variant 'dirichlet' needs --config with geometry.dirichlet faces");
    datum = harness::make_datum(*cfg);
  }
  const EnergyBreakdown e = total_energy(u, v, params, datum ? &*datum : nullptr, c.policy());
  const nlohmann::json j = to_json(e);
  std::cout << j.dump(2) << '\n';
  if (!c.out.empty()) write_json(output_dir(c, nullptr) / "breakdown.json", j);
  return 0;
}

int cmd_fields(const Common& c, harness::Mode mode) {
  harness::ExperimentConfig cfg = harness::load_config(c.config);
  cfg.mode = mode;
  const fs::path dir = output_dir(c, &cfg);
  for (std::size_t i = 0; i < cfg.eps.size(); ++i) {
    const harness::RowFields f = harness::compute_row_fields(cfg, cfg.eps[i], c.policy());
    write_field_file((dir / ("u_" + row_tag(i) + ".field")).string(), f.u);
    write_field_file((dir / ("v_" + row_tag(i) + ".field")).string(), f.v);
    if (mode == harness::Mode::minimize) {
      nlohmann::json j = to_json(f.report);
      j["eps"] = cfg.eps[i];
      j["delta"] = cfg.scaling.delta(cfg.eps[i]);
      write_json(dir / ("report_" + row_tag(i) + ".json"), j);
    }
    std::cout << "eps=" << format_real(cfg.eps[i]) << " written to " << dir.string() << '\n';
  }
  return 0;
}

int cmd_sweep(const Common& c) {
  const harness::ExperimentConfig cfg = harness::load_config(c.config);
  const fs::path dir = output_dir(c, &cfg);
  const auto rows = harness::run_sweep(cfg, c.policy());
  const fs::path path = dir / cfg.csv_name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  harness::write_csv(out, rows);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  std::cout << rows.size() << " rows written to " << path.string();
  if (failed) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  return 0;
}

int cmd_verify(const Common& c, std::vector<std::string> suites, std::uint64_t seed) {
  if (!c.config.empty()) {
    const harness::ExperimentConfig cfg = harness::load_config(c.config);
    if (suites.empty()) suites = cfg.verify_suites;
    seed = cfg.seed;
  }
  const harness::VerifyReport report = harness::run_verify(suites, seed);
  const nlohmann::json j = harness::to_json(report);
  std::cout << j.dump(2) << '\n';
  if (!c.out.empty()) write_json(output_dir(c, nullptr) / "verify.json", j);
  return report.passed() ? 0 : kExitFailure;
}

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "TOML experiment configuration");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_flag("--deterministic", c.deterministic, "thread-count independent reductions");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice phase-field fracture: energies, recovery pairs, solvers and sweeps"};
  app.require_subcommand(1);
  Common common;

  auto* evaluate = app.add_subcommand("evaluate", "evaluate the energy of a (u, v) pair");
  add_common(evaluate, common, false);
  std::string u_path, v_path, variant;
  std::optional<double> lambda, theta, eps, bound;
  evaluate->add_option("--u", u_path, "displacement field file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--v", v_path, "phase field file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--lambda", lambda, "elastic weight");
  evaluate->add_option("--theta", theta, "divergence weight");
  evaluate->add_option("--eps", eps, "phase-field width");
  evaluate->add_option("--variant", variant, "plain | dirichlet | ni")
      ->check(CLI::IsMember({"plain", "dirichlet", "ni"}));
  evaluate->add_option("--M", bound, "displacement bound for variant ni");

  auto* minimize = app.add_subcommand("minimize", "alternate minimization for every eps in the schedule");
  add_common(minimize, common, true);
  auto* sweep = app.add_subcommand("sweep", "run a schedule and write the CSV table");
  add_common(sweep, common, true);
  auto* recovery = app.add_subcommand("recovery", "write recovery pairs for every eps in the schedule");
  add_common(recovery, common, true);

  auto* verify = app.add_subcommand("verify", "run invariant suites and print a JSON report");
  add_common(verify, common, false);
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  verify->add_option("suites", suites, "suite names (default: all)");
  verify->add_option("--seed", seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evaluate) return cmd_evaluate(common, u_path, v_path, lambda, theta, eps, variant, bound);
    if (*minimize) return cmd_fields(common, harness::Mode::minimize);
    if (*recovery) return cmd_fields(common, harness::Mode::evaluate_recovery);
    if (*sweep) return cmd_sweep(common);
    if (*verify) return cmd_verify(common, suites, seed);
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
