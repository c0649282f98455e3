// Dispatch, the acceptance battery and the command driver.

#include <chrono>
#include <iostream>
#include <map>

#include "obslab/app/experiments.hpp"

namespace obslab::app {

namespace fs = std::filesystem;

Report run_experiment(const ExperimentConfig& c) {
  using Runner = Report (*)(const ExperimentConfig&);
  static const std::map<std::string, Runner> runners = {
      {"propagation", run_propagation}, {"uncertainty", run_uncertainty},   {"minimal-velocity", run_minimal_velocity},
      {"enss", run_enss},               {"observability", run_observability}, {"sharpness", run_sharpness},
      {"control", run_control},         {"commutator", run_commutator}};
  const auto it = runners.find(c.experiment);
  if (it == runners.end()) throw ConfigError("unknown experiment \"" + c.experiment + "\"");
  const auto start = std::chrono::steady_clock::now();
  Report r = it->second(c);
  r.experiment = c.experiment;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace {

SuiteEntry entry(std::string name, int criterion, std::string experiment, const char* json) {
  Json cfg = Json::parse(json);
  cfg["experiment"] = experiment;
  return {std::move(name), criterion, std::move(experiment), std::move(cfg)};
}

}  // namespace

const std::vector<SuiteEntry>& suite_entries() {
  static const std::vector<SuiteEntry> entries = {
      entry("propagation", 1, "propagation", R"({
        "grid": {"half_extent": 64, "points": 4096},
        "hamiltonian": {"kind": "free"},
        "params": {"reference_times": [0.5, 2],
                   "splitstep": {"half_extent": 16, "points": 256, "dt": 0.001, "time": 1}}
      })"),
      entry("uncertainty", 2, "uncertainty", R"({
        "grid": {"half_extent": 32, "points": 1024},
        "hamiltonian": {"kind": "free"},
        "params": {"radii": [0.5, 1, 2, 4], "deltas": [0.25, 0.5, 1, 2],
                   "probe": {"radius": 1, "delta": 1}}
      })"),
      entry("collapse_free", 3, "uncertainty", R"({
        "grid": {"half_extent": 256, "points": 16384},
        "hamiltonian": {"kind": "free"},
        "params": {"radii": [1, 2, 4, 8], "deltas": [0.0625, 0.25, 1, 4],
                   "probe": {"dense_check": false, "require_norm_below_one": false},
                   "require_collapse": true}
      })"),
      entry("collapse_fractional_s1", 3, "uncertainty", R"({
        "grid": {"half_extent": 256, "points": 16384},
        "hamiltonian": {"kind": "fractional", "exponent": 1},
        "params": {"radii": [1, 2, 4, 8], "deltas": [0.25, 0.5, 1, 2],
                   "probe": {"dense_check": false, "require_norm_below_one": false},
                   "require_collapse": true}
      })"),
      entry("collapse_fractional_s3", 3, "uncertainty", R"({
        "grid": {"half_extent": 256, "points": 16384},
        "hamiltonian": {"kind": "fractional", "exponent": 3},
        "params": {"radii": [1, 2, 4, 8], "deltas": [0.015625, 0.125, 1, 8],
                   "probe": {"dense_check": false, "require_norm_below_one": false},
                   "require_collapse": true}
      })"),
      entry("minimal_velocity_free", 4, "minimal-velocity", R"({
        "grid": {"half_extent": 512, "points": 8192},
        "hamiltonian": {"kind": "free", "convention": "full"},
        "params": {"window": {"lo": 1, "hi": 4, "ramp": 0.5}, "data": {"kind": "gaussian", "width": 1},
                   "velocity_fraction": 0.5,
                   "times": [5, 7.5, 10, 12.5, 15, 20, 25, 30, 35, 40, 45, 50]}
      })"),
      entry("minimal_velocity_potential", 4, "minimal-velocity", R"({
        "grid": {"half_extent": 256, "points": 1024},
        "hamiltonian": {"kind": "potential", "potential": "gaussian_repulsive", "beta": 1, "convention": "half"},
        "params": {"window": {"lo": 0.5, "hi": 2, "ramp": 0.5}, "data": {"kind": "gaussian", "width": 1},
                   "velocity_fraction": 0.5,
                   "times": [5, 7.5, 10, 12.5, 15, 20, 25, 30, 35, 40, 45, 50]}
      })"),
      entry("enss", 5, "enss", R"({
        "grid": {"half_extent": 256, "points": 1024},
        "hamiltonian": {"kind": "free", "convention": "half"},
        "params": {"window": {"lo": 1, "hi": 2, "ramp": 0.25}, "velocity": 0.5, "shifts": [-20, 0, 20],
                   "observation_radius": 32, "times": [5, 7.5, 10, 15, 20, 25, 30, 35, 40]}
      })"),
      entry("observability_free", 6, "observability", R"({
        "grid": {"half_extent": 1024, "points": 16384},
        "hamiltonian": {"kind": "free", "convention": "full"},
        "params": {"radius": 1, "gaps": [10, 20, 40], "T0": 5, "energy_max": 64,
                   "data": {"kind": "bump", "radius": 1}}
      })"),
      entry("observability_fractional_s1", 6, "observability", R"({
        "grid": {"half_extent": 512, "points": 8192},
        "hamiltonian": {"kind": "fractional", "exponent": 1},
        "params": {"radius": 1, "gaps": [10, 20, 40], "T0": 5, "energy_max": 8,
                   "data": {"kind": "bump", "radius": 1}}
      })"),
      entry("sharpness_free", 7, "sharpness", R"({
        "grid": {"half_extent": 1024, "points": 262144},
        "hamiltonian": {"kind": "free"},
        "params": {"ks": [1, 2, 4, 8], "r1": 0.1, "sigma": 0.5, "time": 2}
      })"),
      entry("sharpness_potential", 7, "sharpness", R"({
        "grid": {"half_extent": 512, "points": 131072},
        "hamiltonian": {"kind": "potential", "potential": "gaussian_repulsive", "beta": 1, "convention": "half"},
        "engine": "splitstep", "dt": 0.001,
        "params": {"ks": [1, 2, 4, 8], "r1": 0.1, "sigma": 0.5, "time": 2}
      })"),
      entry("sharpness_fractional_s1", 7, "sharpness", R"({
        "grid": {"half_extent": 512, "points": 131072},
        "hamiltonian": {"kind": "fractional", "exponent": 1},
        "params": {"ks": [1, 2, 4, 8], "r1": 0.1, "sigma": 0.5, "time": 2}
      })"),
      entry("control", 8, "control", R"({
        "grid": {"half_extent": 32, "points": 512},
        "hamiltonian": {"kind": "free", "convention": "full"},
        "params": {"tau1": 1, "tau2": 13, "horizon": 14, "radius": 1, "sigma": 0.85, "T0": 5,
                   "epsilons": [0.01, 0.0001, 0.000001],
                   "initial": {"kind": "packet", "center": -1, "momentum": 2, "width": 1},
                   "target": {"kind": "packet", "center": 2, "momentum": 0, "width": 1},
                   "verify_engine": "dense"}
      })"),
      entry("commutator", 9, "commutator", R"({
        "grid": {"half_extent": 12, "points": 1024},
        "params": {"profile_width": 4, "Ns": [8, 16, 32, 64, 128]}
      })"),
  };
  return entries;
}

SuiteOutcome run_suite(const Overrides& o, const std::vector<int>& only) {
  SuiteOutcome out;
  // Parse every entry first so a bad override fails before any work.
  std::vector<std::pair<const SuiteEntry*, ExperimentConfig>> todo;
  for (const auto& e : suite_entries()) {
    if (!only.empty() && std::find(only.begin(), only.end(), e.criterion) == only.end()) continue;
    try {
      todo.emplace_back(&e, parse_config(e.config, e.experiment, o));
    } catch (const ConfigError& err) {
      throw ConfigError(e.name + ": " + err.what());
    }
  }
  Report& s = out.summary;
  s.experiment = "suite";
  s.config = Json{{"seed", todo.empty() ? 0x5EED : todo.front().second.seed},
                  {"engine_override", o.engine ? Json(*o.engine) : Json(nullptr)}};
  Json criteria = Json::object();
  Json parts = Json::array();
  for (auto& [e, cfg] : todo) {
    Report r;
    try {
      r = run_experiment(cfg);
    } catch (const ConfigError& err) {
      throw ConfigError(e->name + ": " + err.what());
    }
    s.wall_seconds += r.wall_seconds;
    Json failed = Json::array();
    for (const auto& v : r.verdicts)
      if (v.gating && !v.passed) failed.push_back(v.name);
    parts.push_back(Json{{"name", e->name}, {"criterion", e->criterion}, {"experiment", e->experiment},
                         {"passed", r.passed()}, {"failed_verdicts", failed}, {"report", e->name + "/report.json"}});
    const std::string key = std::to_string(e->criterion);
    if (!criteria.contains(key)) criteria[key] = Json{{"passed", true}, {"entries", Json::array()}};
    criteria[key]["entries"].push_back(e->name);
    criteria[key]["passed"] = criteria[key]["passed"].get<bool>() && r.passed();
    s.add(check_true(e->name, r.passed(), "suite.criterion_" + key));
    out.parts.emplace_back(*e, std::move(r));
  }
  s.results["criteria"] = criteria;
  s.results["parts"] = parts;
  return out;
}

void write_suite(const fs::path& dir, const SuiteOutcome& s) {
  for (const auto& [e, r] : s.parts) write_report(dir / e.name, r);
  write_report(dir, s.summary);
}

int run_command(const std::string& experiment, const Json& doc, const Overrides& o, const fs::path& out_dir,
                std::string& message) {
  try {
    const ExperimentConfig c = parse_config(doc, experiment, o);
    const Report r = run_experiment(c);
    write_report(out_dir, r);
    message = experiment + (r.passed() ? ": PASS" : ": FAIL");
    for (const auto& v : r.verdicts)
      if (!v.passed)
        message += "\n  " + std::string(v.gating ? "failed: " : "failed (non-gating): ") + v.name + " (" +
                   format_csv_number(v.value) + " " + v.comparison + " " + format_csv_number(v.threshold) + ")";
    return r.passed() ? kExitPass : kExitFail;
  } catch (const ConfigError& e) {
    message = std::string("config error: ") + e.what();
    return kExitError;
  } catch (const std::exception& e) {
    message = std::string("error: ") + e.what();
    return kExitError;
  }
}

}  // namespace obslab::app
