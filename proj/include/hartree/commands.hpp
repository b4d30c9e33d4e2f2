#pragma once

// The five CLI entry points, factored out of main() so tests can drive them
// in-process. Each writes its outputs plus a manifest.txt into
// cfg.output_dir and returns the process exit code: 0 on success, 2 when the
// hypothesis checker finds a violation, with runtime errors thrown as
// exceptions (the CLI maps those to exit 1).

#include "hartree/config.hpp"

namespace hartree {

// Coupled mean-field evolution; writes trajectory.htrj + diagnostics.csv.
int cmd_run(const SimulationConfig& cfg);

// Fixed-point iteration over [0, segments * T1]; additionally writes
// picard_report.csv. Returns 1 (after writing everything) if the final
// segment did not reach picard.tol.
int cmd_picard(const SimulationConfig& cfg);

// Mean-field vs full 2D evolution; writes error.csv + psi_final.htr2.
int cmd_compare(const SimulationConfig& cfg);

// Hypothesis checks on the configured potentials; writes assumptions.txt.
int cmd_check(const SimulationConfig& cfg);

// Per-factor imaginary-time ground states of the *unshifted* potentials;
// writes ground_state.htrj + ground_state.csv.
int cmd_ground_state(const SimulationConfig& cfg);

} // namespace hartree
