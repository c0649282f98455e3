#pragma once

// Helpers shared by the experiment runners.

#include <memory>
#include <string>

#include "obslab/app/experiments.hpp"
#include "obslab/lab.hpp"

namespace obslab::app::detail {

/// Initial data: gaussian (width), packet (width, center, momentum along
/// axis 0), bump and odd_bump (radius). Normalized.
Field read_data(Section& parent, const std::string& key, const GridSpec& g, const std::string& default_kind);

/// Dense eigendecomposition when the run needs one; throws ConfigError when
/// the grid is too large for it.
std::shared_ptr<const EigenDecomposition> decompose_if(bool needed, const HamiltonianSpec& h, const std::string& why);

PowerIterationOptions read_power(Section& p, std::uint64_t seed, double tolerance, int max_iterations);

/// Evolves psi to t with the configured engine and with dense, when the grid
/// allows and the engine is not already dense; adds a gating verdict.
void engine_cross_check(Report& r, const Propagator& p, const Field& psi, double t);

Series decay_csv(const std::string& name, const DecaySeries& s);
Json decay_json(const DecaySeries& s);

Json grid_json(const GridSpec& g);

}  // namespace obslab::app::detail
