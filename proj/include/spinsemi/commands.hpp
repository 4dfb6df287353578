#ifndef SPINSEMI_COMMANDS_HPP
#define SPINSEMI_COMMANDS_HPP

#include <complex>
#include <string>

#include "spinsemi/run_config.hpp"

namespace spinsemi::cli {

// Each command writes its dataset(s) under config.output_dir and returns the
// primary file's path. All outputs are deterministic for a fixed config.

// quantum_entropy.csv: tau,S_exact
std::string cmd_quantum(const RunConfig& config);

// semiclassical_entropy.csv: tau,S_sc,S_exact,nSetsActive; branches.json with
// the per-branch breakdown
std::string cmd_semiclassical(const RunConfig& config);

// rootmap_<tau>.csv: residual samples over the search annulus plus the list
// of converged roots; tau may be complex (imaginary-time diagnostics)
std::string cmd_rootmap(const RunConfig& config, cplx tau);

// diagnostics.json: det M and det M_star over the tau grid, the critical
// time, and an action-identity residual summary
std::string cmd_diagnostics(const RunConfig& config);

} // namespace spinsemi::cli

#endif
