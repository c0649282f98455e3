#include "obslab/app/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace obslab::app {

Section::Section(const Json& in, std::string path) : in_(in.is_null() ? Json::object() : in), path_(std::move(path)) {
  if (!in_.is_object()) throw ConfigError(path_ + ": expected an object");
}

void Section::fail(const std::string& key, const std::string& why) const {
  throw ConfigError(path_ + (path_.empty() ? "" : ".") + key + ": " + why);
}

const Json* Section::lookup(const std::string& key) {
  used_.insert(key);
  const auto it = in_.find(key);
  return it == in_.end() ? nullptr : &*it;
}

bool Section::has(const std::string& key) const { return in_.contains(key); }

double Section::number(const std::string& key, double fallback) {
  const Json* v = lookup(key);
  double x = fallback;
  if (v) {
    if (!v->is_number()) fail(key, "expected a number");
    x = v->get<double>();
  }
  if (!std::isfinite(x)) fail(key, "must be finite");
  out_[key] = x;
  return x;
}

double Section::number(const std::string& key) {
  if (!has(key)) fail(key, "required");
  return number(key, 0.0);
}

double Section::positive(const std::string& key, double fallback) {
  const double x = number(key, fallback);
  if (!(x > 0.0)) fail(key, "must be positive");
  return x;
}

int Section::integer(const std::string& key, int fallback) {
  const Json* v = lookup(key);
  int x = fallback;
  if (v) {
    if (!v->is_number_integer()) fail(key, "expected an integer");
    x = v->get<int>();
  }
  out_[key] = x;
  return x;
}

std::uint64_t Section::unsigned64(const std::string& key, std::uint64_t fallback) {
  const Json* v = lookup(key);
  std::uint64_t x = fallback;
  if (v) {
    if (!v->is_number_unsigned()) fail(key, "expected a nonnegative integer");
    x = v->get<std::uint64_t>();
  }
  out_[key] = x;
  return x;
}

bool Section::flag(const std::string& key, bool fallback) {
  const Json* v = lookup(key);
  bool x = fallback;
  if (v) {
    if (!v->is_boolean()) fail(key, "expected true or false");
    x = v->get<bool>();
  }
  out_[key] = x;
  return x;
}

std::string Section::text(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
  const Json* v = lookup(key);
  std::string x = fallback;
  if (v) {
    if (!v->is_string()) fail(key, "expected a string");
    x = v->get<std::string>();
  }
  if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), x) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
    fail(key, "must be one of " + list + ", got \"" + x + "\"");
  }
  out_[key] = x;
  return x;
}

std::vector<double> Section::numbers(const std::string& key, const std::vector<double>& fallback) {
  const Json* v = lookup(key);
  std::vector<double> x = fallback;
  if (v) {
    if (!v->is_array()) fail(key, "expected an array of numbers");
    x.clear();
    for (const auto& e : *v) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      x.push_back(e.get<double>());
      if (!std::isfinite(x.back())) fail(key, "entries must be finite");
    }
  }
  out_[key] = x;
  return x;
}

std::vector<int> Section::integers(const std::string& key, const std::vector<int>& fallback) {
  const Json* v = lookup(key);
  std::vector<int> x = fallback;
  if (v) {
    if (!v->is_array()) fail(key, "expected an array of integers");
    x.clear();
    for (const auto& e : *v) {
      if (!e.is_number_integer()) fail(key, "expected an array of integers");
      x.push_back(e.get<int>());
    }
  }
  out_[key] = x;
  return x;
}

Section Section::child(const std::string& key) {
  const Json* v = lookup(key);
  if (v && !v->is_object()) fail(key, "expected an object");
  return Section(v ? *v : Json::object(), path_.empty() ? key : path_ + "." + key);
}

void Section::adopt(const std::string& key, Section& child) {
  child.finish();
  out_[key] = child.echo();
}

void Section::finish() {
  for (const auto& [k, v] : in_.items())
    if (!used_.count(k)) fail(k, "unknown key");
}

SmoothWindowConfig read_window(Section& parent, const std::string& key, SmoothWindowConfig fallback) {
  Section s = parent.child(key);
  SmoothWindowConfig w;
  w.lo = s.number("lo", fallback.lo);
  w.hi = s.number("hi", fallback.hi);
  w.ramp = s.positive("ramp", fallback.ramp);
  if (!(w.lo >= 0.0)) s.fail("lo", "must be nonnegative");
  if (!(2.0 * w.ramp <= w.hi - w.lo)) s.fail("ramp", "two ramps must fit inside [lo, hi]");
  parent.adopt(key, s);
  return w;
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"uncertainty", "observability", "minimal-velocity", "enss",
                                                 "sharpness",   "control",       "commutator",       "propagation"};
  return kinds;
}

PropagatorPlan ExperimentConfig::plan() const {
  PropagatorPlan p;
  p.engine = engine == "auto" ? default_engine(hamiltonian) : engine_from_string(engine);
  p.dt = dt;
  return p;
}

namespace {

HamiltonianSpec read_hamiltonian(Section& s, const GridSpec& g) {
  const std::string kind = s.text("kind", "free", {"free", "fractional", "potential", "inverse_square"});
  const auto conv = convention_from_string(s.text("convention", "full", {"full", "half"}));
  try {
    if (kind == "free") return HamiltonianSpec::free(g, conv);
    if (kind == "fractional") {
      const double e = s.number("exponent", 1.0);
      if (!(e >= 1.0)) s.fail("exponent", "must be at least 1");
      return HamiltonianSpec::fractional(g, e, conv);
    }
    if (kind == "potential") {
      const std::string name =
          s.text("potential", "gaussian_repulsive", {"zero", "gaussian_repulsive", "gaussian_well", "ball_indicator"});
      const double beta = name == "zero" ? 0.0 : s.number("beta", 1.0);
      return HamiltonianSpec::with_potential(g, make_potential(name, beta), conv);
    }
    return HamiltonianSpec::inverse_square(g, s.number("coupling", 0.2), conv);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const Json& doc, const std::string& experiment, const Overrides& o) {
  Section top(doc, "");
  ExperimentConfig c;
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), experiment) == kinds.end())
    throw ConfigError("unknown experiment \"" + experiment + "\"");
  if (top.has("experiment")) {
    const std::string named = top.text("experiment", experiment);
    if (named != experiment)
      throw ConfigError("config is for experiment \"" + named + "\", not \"" + experiment + "\"");
  } else {
    top.text("experiment", experiment);
  }
  c.experiment = experiment;
  c.seed = top.unsigned64("seed", 0x5EED);
  if (o.seed) {
    c.seed = *o.seed;
  }

  Section grid = top.child("grid");
  const int dim = grid.integer("dim", 1);
  const double L = grid.positive("half_extent", 32.0);
  const int n = grid.integer("points", 1024);
  const auto budget = grid.unsigned64("dof_budget", kDefaultDofBudget);
  if (dim < 1 || dim > 3) grid.fail("dim", "must be 1, 2 or 3");
  if (n < 2 || n % 2 != 0) grid.fail("points", "must be an even integer >= 2");
  try {
    c.grid = make_grid(dim, L, static_cast<std::size_t>(n), budget);
  } catch (const Error& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  top.adopt("grid", grid);

  Section ham = top.child("hamiltonian");
  c.hamiltonian = read_hamiltonian(ham, c.grid);
  top.adopt("hamiltonian", ham);

  c.engine = top.text("engine", "auto", {"auto", "multiplier", "splitstep", "dense"});
  if (o.engine) c.engine = *o.engine;
  c.dt = top.positive("dt", 1e-3);
  const auto plan = c.plan();
  if (plan.engine == Engine::multiplier && c.hamiltonian.has_potential())
    throw ConfigError("engine: multiplier cannot propagate a potential; use splitstep or dense");
  if (plan.engine == Engine::dense && c.grid.dofs() > kDenseDofLimit)
    throw ConfigError("engine: dense needs at most " + std::to_string(kDenseDofLimit) + " grid points");

  {
    const Json* p = nullptr;
    if (doc.is_object() && doc.contains("params")) p = &doc.at("params");
    if (p && !p->is_object()) throw ConfigError("params: expected an object");
    c.params = p ? *p : Json::object();
    top.child("params");  // marks the key as known; contents are read by the experiment
  }
  top.finish();
  c.echo = top.echo();
  c.echo["engine"] = c.engine;
  c.echo["seed"] = c.seed;
  c.echo["resolved_engine"] = to_string(plan.engine);
  return c;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace obslab::app
