#include "latfrac/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace latfrac::harness {

namespace {

/// A TOML table together with its dotted path; tracks which keys were read so that
/// leftovers can be reported as unknown.
class Section {
 public:
  Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

  bool present() const { return table_ != nullptr; }
  bool has(const std::string& key) const { return table_ && table_->contains(key); }

  const toml::node* node(const std::string& key) {
    seen_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("config key '" + name(key) + "': " + what);
  }

  std::optional<double> number(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto i = n->value_exact<std::int64_t>()) return static_cast<double>(*i);
    if (auto d = n->value_exact<double>()) return *d;
    fail(key, "expected a number");
  }
  std::optional<std::int64_t> integer(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto i = n->value_exact<std::int64_t>()) return *i;
    fail(key, "expected an integer");
  }
  std::optional<bool> boolean(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto b = n->value_exact<bool>()) return *b;
    fail(key, "expected a boolean");
  }
  std::optional<std::string> string(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto s = n->value_exact<std::string>()) return *s;
    fail(key, "expected a string");
  }
  std::optional<std::vector<double>> numbers(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* arr = n->as_array();
    if (!arr) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *arr) {
      if (auto i = e.value_exact<std::int64_t>())
        out.push_back(static_cast<double>(*i));
      else if (auto d = e.value_exact<double>())
        out.push_back(*d);
      else
        fail(key, "expected an array of numbers");
    }
    return out;
  }
  std::optional<std::vector<std::string>> strings(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* arr = n->as_array();
    if (!arr) fail(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *arr) {
      auto s = e.value_exact<std::string>();
      if (!s) fail(key, "expected an array of strings");
      out.push_back(*s);
    }
    return out;
  }
  Section table(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return Section(nullptr, name(key));
    if (!n->is_table()) fail(key, "expected a table");
    return Section(n->as_table(), name(key));
  }

  /// Throws ConfigError naming the first key that was never read.
  void finish() const {
    if (!table_) return;
    for (const auto& [key, value] : *table_) {
      const std::string k(key.str());
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + name(k) + "'");
    }
  }

 private:
  const toml::table* table_;
  std::string path_;
  std::set<std::string> seen_;
};

Point to_point(const std::vector<double>& values, int dim, Section& s, const std::string& key) {
  if (static_cast<int>(values.size()) != dim) s.fail(key, "expected " + std::to_string(dim) + " entries");
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) p[k] = values[static_cast<std::size_t>(k)];
  return p;
}

Side parse_side(const std::string& text, Section& s, const std::string& key) {
  if (text == "lower") return Side::lower;
  if (text == "upper") return Side::upper;
  s.fail(key, "side must be 'lower' or 'upper'");
}

void parse_dirichlet(Section s, int dim, ExperimentConfig& cfg) {
  if (!s.present()) return;
  if (auto extended = s.boolean("extended")) cfg.dirichlet.extended = *extended;
  if (auto collar = s.integer("collar")) cfg.dirichlet.collar = static_cast<int>(*collar);
  const toml::node* faces = s.node("faces");
  if (faces) {
    const toml::array* arr = faces->as_array();
    if (!arr) s.fail("faces", "expected an array of tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table* t = arr->get(i)->as_table();
      if (!t) s.fail("faces", "expected an array of tables");
      Section f(t, s.name("faces") + "[" + std::to_string(i) + "]");
      DirichletFace face;
      const auto axis = f.integer("axis");
      if (!axis) f.fail("axis", "missing");
      if (*axis < 0 || *axis >= dim) f.fail("axis", "out of range");
      face.axis = static_cast<int>(*axis);
      const auto side = f.string("side");
      if (!side) f.fail("side", "missing");
      face.side = parse_side(*side, f, "side");
      if (auto lo = f.numbers("lo")) {
        const Point p = to_point(*lo, dim, f, "lo");
        for (int k = 0; k < dim; ++k) face.lo[k] = p[k];
      }
      if (auto hi = f.numbers("hi")) {
        const Point p = to_point(*hi, dim, f, "hi");
        for (int k = 0; k < dim; ++k) face.hi[k] = p[k];
      }
      f.finish();
      cfg.dirichlet.faces.push_back(face);
    }
  }
  s.finish();
}

Matrix parse_matrix(Section& s, const std::string& key, int dim) {
  const toml::node* n = s.node(key);
  Matrix m{};
  if (!n) return m;
  const toml::array* rows = n->as_array();
  if (!rows || static_cast<int>(rows->size()) != dim) s.fail(key, "expected a d x d array");
  for (int i = 0; i < dim; ++i) {
    const toml::array* row = rows->get(static_cast<std::size_t>(i))->as_array();
    if (!row || static_cast<int>(row->size()) != dim) s.fail(key, "expected a d x d array");
    for (int j = 0; j < dim; ++j) {
      const toml::node* e = row->get(static_cast<std::size_t>(j));
      if (auto iv = e->value_exact<std::int64_t>())
        m[i][j] = static_cast<double>(*iv);
      else if (auto dv = e->value_exact<double>())
        m[i][j] = *dv;
      else
        s.fail(key, "expected numbers");
    }
  }
  return m;
}

Mode parse_mode(const std::string& text, Section& s) {
  if (text == "evaluate-recovery") return Mode::evaluate_recovery;
  if (text == "minimize") return Mode::minimize;
  if (text == "verify") return Mode::verify;
  s.fail("mode", "expected 'evaluate-recovery', 'minimize' or 'verify'");
}

void positive(Section& s, const std::string& key, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) s.fail(key, "must be positive");
}

ExperimentConfig from_table(const toml::table& root) {
  Section top(&root, "");
  ExperimentConfig cfg;

  const auto version = top.integer("version");
  if (!version) top.fail("version", "missing (expected version = 1)");
  if (*version != 1) top.fail("version", "unsupported version " + std::to_string(*version));
  if (auto mode = top.string("mode")) cfg.mode = parse_mode(*mode, top);
  if (auto seed = top.integer("seed")) {
    if (*seed < 0) top.fail("seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }

  {
    Section g = top.table("geometry");
    int dim = 2;
    if (auto d = g.integer("dim")) dim = static_cast<int>(*d);
    if (dim != 2 && dim != 3) g.fail("dim", "must be 2 or 3");
    cfg.box = Box::unit(dim);
    if (auto origin = g.numbers("origin")) cfg.box.origin = to_point(*origin, dim, g, "origin");
    if (auto lengths = g.numbers("lengths")) {
      cfg.box.lengths = to_point(*lengths, dim, g, "lengths");
      for (int k = 0; k < dim; ++k) positive(g, "lengths", cfg.box.lengths[k]);
    }
    parse_dirichlet(g.table("dirichlet"), dim, cfg);
    g.finish();
  }
  const int dim = cfg.box.dim;

  {
    Section t = top.table("target");
    if (auto kind = t.string("kind")) {
      if (*kind == "jump")
        cfg.target.kind = TargetKind::jump;
      else if (*kind == "affine")
        cfg.target.kind = TargetKind::affine;
      else
        t.fail("kind", "expected 'jump' or 'affine'");
    }
    if (auto offset = t.number("offset")) cfg.target.offset = *offset;
    if (auto jump = t.numbers("jump")) cfg.target.jump = to_point(*jump, dim, t, "jump");
    cfg.target.matrix = parse_matrix(t, "matrix", dim);
    if (auto shift = t.numbers("shift")) cfg.target.shift = to_point(*shift, dim, t, "shift");
    t.finish();
  }

  {
    Section p = top.table("params");
    if (auto v = p.number("lambda")) cfg.lambda = *v;
    if (auto v = p.number("theta")) cfg.theta = *v;
    positive(p, "lambda", cfg.lambda);
    positive(p, "theta", cfg.theta);
    if (auto v = p.number("M")) {
      if (!(*v >= 0.0)) p.fail("M", "must be nonnegative");
      cfg.max_displacement = *v;
    }
    if (auto v = p.string("variant")) {
      try {
        cfg.variant = parse_variant(*v);
      } catch (const std::invalid_argument&) {
        p.fail("variant", "expected 'plain', 'dirichlet' or 'ni'");
      }
    }
    if (cfg.variant == Variant::ni && !cfg.max_displacement) p.fail("M", "required by variant 'ni'");
    p.finish();
  }

  {
    Section s = top.table("schedule");
    if (auto eps = s.numbers("eps")) cfg.eps = *eps;
    const bool has_preset = s.has("preset");
    const bool explicit_rule = s.has("coefficient") || s.has("exponent");
    if (has_preset && explicit_rule) s.fail("preset", "cannot be combined with coefficient/exponent");
    if (auto preset = s.string("preset")) {
      try {
        cfg.scaling = scaling_preset(*preset);
      } catch (const ConfigError&) {
        s.fail("preset", "expected 'subcritical', 'critical' or 'ni-upper'");
      }
    }
    if (auto c = s.number("coefficient")) cfg.scaling.coefficient = *c;
    if (auto p = s.number("exponent")) cfg.scaling.exponent = *p;
    positive(s, "coefficient", cfg.scaling.coefficient);
    positive(s, "exponent", cfg.scaling.exponent);
    for (std::size_t i = 0; i < cfg.eps.size(); ++i) {
      positive(s, "eps", cfg.eps[i]);
      if (i > 0 && !(cfg.eps[i] < cfg.eps[i - 1])) s.fail("eps", "must be strictly decreasing");
    }
    s.finish();
  }
  if (cfg.mode != Mode::verify && cfg.eps.empty()) throw ConfigError("config key 'schedule.eps': empty schedule");

  {
    Section r = top.table("recovery");
    if (auto v = r.number("eta")) cfg.recovery.eta = *v;
    if (!(cfg.recovery.eta > 0.0 && cfg.recovery.eta < 1.0)) r.fail("eta", "must lie in (0, 1)");
    if (auto v = r.number("gamma_coefficient")) cfg.recovery.gamma.coefficient = *v;
    if (auto v = r.number("gamma_exponent")) cfg.recovery.gamma.exponent = *v;
    positive(r, "gamma_coefficient", cfg.recovery.gamma.coefficient);
    positive(r, "gamma_exponent", cfg.recovery.gamma.exponent);
    if (auto v = r.boolean("allow_boundary_crack")) cfg.recovery.allow_boundary_crack = *v;
    if (auto v = r.boolean("translation_scan")) cfg.translation_scan = *v;
    r.finish();
  }

  {
    Section s = top.table("solver");
    SolverConfig& sc = cfg.solver;
    if (auto v = s.number("outer_tolerance")) sc.outer_tolerance = *v;
    if (auto v = s.integer("max_outer_iterations")) sc.max_outer_iterations = static_cast<int>(*v);
    if (auto v = s.number("cg_tolerance")) sc.cg_tolerance = *v;
    if (auto v = s.integer("cg_max_iterations")) sc.cg_max_iterations = static_cast<int>(*v);
    if (auto v = s.number("armijo")) sc.armijo = *v;
    if (auto v = s.number("backtrack")) sc.backtrack = *v;
    if (auto v = s.integer("max_backtracks")) sc.max_backtracks = static_cast<int>(*v);
    if (auto v = s.number("ni_tolerance")) sc.ni_tolerance = *v;
    if (auto v = s.integer("ni_max_iterations")) sc.ni_max_iterations = static_cast<int>(*v);
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config table 'solver': ") + e.what());
    }
    s.finish();
  }

  {
    Section s = top.table("init");
    if (auto v = s.number("noise")) {
      if (!(*v >= 0.0)) s.fail("noise", "must be nonnegative");
      cfg.init.noise = *v;
    }
    if (auto v = s.numbers("notch")) cfg.init.notch = to_point(*v, dim, s, "notch");
    if (auto v = s.number("notch_radius")) {
      if (!(*v >= 0.0)) s.fail("notch_radius", "must be nonnegative");
      cfg.init.notch_radius = *v;
    }
    s.finish();
  }

  {
    Section s = top.table("output");
    if (auto v = s.string("dir")) cfg.out_dir = *v;
    if (auto v = s.string("csv")) cfg.csv_name = *v;
    s.finish();
  }

  {
    Section s = top.table("verify");
    if (auto v = s.strings("suites")) cfg.verify_suites = *v;
    s.finish();
  }

  top.finish();
  return cfg;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::evaluate_recovery: return "evaluate-recovery";
    case Mode::minimize: return "minimize";
    case Mode::verify: return "verify";
  }
  return "evaluate-recovery";
}

ScalingRule scaling_preset(const std::string& name) {
  if (name == "subcritical") return {1.0, 2.0, name};
  if (name == "critical") return {1.0, 1.0, name};
  if (name == "ni-upper") return {1.0, 3.0, name};
  throw ConfigError("unknown scaling preset '" + name + "'");
}

EnergyParams ExperimentConfig::params(double eps_value) const {
  EnergyParams p;
  p.lambda = lambda;
  p.theta = theta;
  p.eps = eps_value;
  p.delta = scaling.delta(eps_value);
  p.max_displacement = max_displacement;
  p.variant = variant;
  return p;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config syntax error in " << source << ": " << e.description() << " (line " << e.source().begin.line
        << ")";
    throw ConfigError(msg.str());
  }
  return from_table(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

GriffithReference make_target(const ExperimentConfig& config) {
  if (config.target.kind == TargetKind::affine)
    return GriffithReference::affine(config.box, config.target.matrix, config.target.shift);
  return GriffithReference::planar_jump(config.box, config.target.offset, config.target.jump);
}

VectorFunction make_datum(const ExperimentConfig& config) {
  auto ref = std::make_shared<GriffithReference>(make_target(config));
  const Box box = config.box;
  return [ref, box](const Point& x) {
    // Collar nodes lie outside the box; evaluate the datum at the nearest box point.
    Point y = x;
    for (int k = 0; k < box.dim; ++k)
      y[k] = std::clamp(y[k], box.origin[k], box.origin[k] + box.lengths[k]);
    return ref->displacement(y);
  };
}

}  // namespace latfrac::harness
