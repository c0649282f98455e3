#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "obslab/propagate.hpp"

namespace obslab::app {

using Json = nlohmann::ordered_json;

/// Raised for malformed or inconsistent configuration, before any work.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Reads one JSON object, fills defaults and records every value it hands
/// out, so echo() is the fully-defaulted config. finish() rejects keys that
/// were never read.
class Section {
 public:
  Section(const Json& in, std::string path);

  double number(const std::string& key, double fallback);
  double number(const std::string& key);  // required
  double positive(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed = {});
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback);
  bool has(const std::string& key) const;
  /// Nested object; its echo is stored back when the child is finished.
  Section child(const std::string& key);
  void adopt(const std::string& key, Section& child);

  void finish();
  const Json& echo() const { return out_; }
  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& key, const std::string& why) const;

 private:
  const Json* lookup(const std::string& key);

  Json in_;
  Json out_ = Json::object();
  std::string path_;
  std::set<std::string> used_;
};

struct SmoothWindowConfig {
  double lo = 1.0;
  double hi = 4.0;
  double ramp = 0.5;
};
SmoothWindowConfig read_window(Section& parent, const std::string& key, SmoothWindowConfig fallback);

/// Shared part of every experiment config.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0x5EED;
  GridSpec grid;
  HamiltonianSpec hamiltonian;
  std::string engine = "auto";
  double dt = 1e-3;
  Json params;  // experiment-specific, read by the experiment
  Json echo;    // everything above with defaults (params echo added by the run)

  PropagatorPlan plan() const;
};

struct Overrides {
  std::optional<std::string> engine;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& experiment_kinds();

/// Validates the top level, grid, hamiltonian and engine sections.
ExperimentConfig parse_config(const Json& doc, const std::string& experiment, const Overrides& o = {});
Json load_json_file(const std::string& path);

}  // namespace obslab::app
