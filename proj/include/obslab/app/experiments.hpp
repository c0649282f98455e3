#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "obslab/app/config.hpp"
#include "obslab/app/report.hpp"

namespace obslab::app {

// Each runner reads its "params" section (rejecting unknown keys) before
// doing any work, then returns a complete report.
Report run_propagation(const ExperimentConfig& c);
Report run_uncertainty(const ExperimentConfig& c);
Report run_minimal_velocity(const ExperimentConfig& c);
Report run_enss(const ExperimentConfig& c);
Report run_observability(const ExperimentConfig& c);
Report run_sharpness(const ExperimentConfig& c);
Report run_control(const ExperimentConfig& c);
Report run_commutator(const ExperimentConfig& c);

/// Dispatch on c.experiment; fills config echo and wall time.
Report run_experiment(const ExperimentConfig& c);

/// The acceptance battery: one configuration per check, grouped by
/// criterion number.
struct SuiteEntry {
  std::string name;
  int criterion = 0;
  std::string experiment;
  Json config;
};
const std::vector<SuiteEntry>& suite_entries();

struct SuiteOutcome {
  Report summary;
  std::vector<std::pair<SuiteEntry, Report>> parts;
};
/// Runs every entry (optionally only those whose criterion is listed).
SuiteOutcome run_suite(const Overrides& o, const std::vector<int>& only_criteria = {});
/// Writes each part under dir/<name>/ and the summary as dir/report.json.
void write_suite(const std::filesystem::path& dir, const SuiteOutcome& s);

/// Exit codes of the command-line tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

/// Full command: parse, run, write. Config problems are reported before any
/// output exists.
int run_command(const std::string& experiment, const Json& doc, const Overrides& o,
                const std::filesystem::path& out_dir, std::string& message);

}  // namespace obslab::app
