#include "common.hpp"

#include <cmath>

namespace obslab::app::detail {

Field read_data(Section& parent, const std::string& key, const GridSpec& g, const std::string& default_kind) {
  Section s = parent.child(key);
  const std::string kind = s.text("kind", default_kind, {"gaussian", "packet", "bump", "odd_bump"});
  Field f;
  if (kind == "bump" || kind == "odd_bump") {
    const double r = s.positive("radius", 1.0);
    f = smooth_bump(g, r, kind == "odd_bump");
  } else {
    const double w = s.positive("width", 1.0);
    const double x0 = kind == "packet" ? s.number("center", 0.0) : 0.0;
    const double k0 = kind == "packet" ? s.number("momentum", 0.0) : 0.0;
    f = normalized(Field::sample(g, [=](const Point& x) {
      const double r2 = (x[0] - x0) * (x[0] - x0) + x[1] * x[1] + x[2] * x[2];
      return std::polar(std::exp(-r2 / (2 * w * w)), k0 * x[0]);
    }));
  }
  parent.adopt(key, s);
  return f;
}

std::shared_ptr<const EigenDecomposition> decompose_if(bool needed, const HamiltonianSpec& h, const std::string& why) {
  if (!needed) return nullptr;
  if (h.grid.dofs() > kDenseDofLimit)
    throw ConfigError(why + " needs a dense eigenbasis, which is limited to " + std::to_string(kDenseDofLimit) +
                      " grid points");
  return diagonalize(h);
}

PowerIterationOptions read_power(Section& p, std::uint64_t seed, double tolerance, int max_iterations) {
  Section s = p.child("power");
  PowerIterationOptions o;
  o.seed = seed;
  o.tolerance = s.positive("tolerance", tolerance);
  o.max_iterations = s.integer("max_iterations", max_iterations);
  if (o.max_iterations < 1) s.fail("max_iterations", "must be at least 1");
  p.adopt("power", s);
  return o;
}

void engine_cross_check(Report& r, const Propagator& p, const Field& psi, double t) {
  const auto& h = p.hamiltonian();
  if (p.plan().engine == Engine::dense || h.grid.dofs() > kDenseDofLimit) return;
  const Propagator dense(h, {Engine::dense});
  const Field a = p.evolve(psi, t);
  const Field b = dense.evolve(psi, t);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  const double rel = std::sqrt(num / den);
  const double tol = p.plan().engine == Engine::multiplier ? 1e-8 : 1e-6;
  Json e;
  e["engine"] = to_string(p.plan().engine);
  e["reference"] = "dense";
  e["time"] = t;
  e["relative_difference"] = number(rel);
  r.results["engine_cross_check"] = e;
  r.add(check("engine agrees with dense", rel, "<=", tol, "propagation.engine_agreement"));
}

Series decay_csv(const std::string& name, const DecaySeries& s) {
  Series out;
  out.name = name;
  std::vector<double> fitted;
  for (double t : s.times)
    fitted.push_back(s.fit.valid ? std::exp(s.fit.intercept) * std::pow(t, s.fit.slope)
                                 : std::numeric_limits<double>::quiet_NaN());
  out.add_column("t", s.times);
  out.add_column("value", s.values);
  out.add_column("fitted_value", fitted);
  return out;
}

Json decay_json(const DecaySeries& s) {
  Json j;
  j["times"] = numbers(s.times);
  j["values"] = numbers(s.values);
  j["fit_start_index"] = s.fit_start;
  j["fit"] = Json{{"valid", s.fit.valid},
                  {"slope", number(s.fit.slope)},
                  {"slope_stderr", number(s.fit.slope_stderr)},
                  {"log_constant", number(s.fit.intercept)},
                  {"r_squared", number(s.fit.r_squared)},
                  {"points", s.fit.points}};
  j["max_boundary_mass"] = number(s.max_wrap_mass);
  return j;
}

Json grid_json(const GridSpec& g) {
  return Json{{"dim", g.dim},
              {"half_extent", g.half_extent},
              {"points", g.points_per_axis},
              {"spacing", g.spacing()},
              {"dofs", g.dofs()}};
}

}  // namespace obslab::app::detail
