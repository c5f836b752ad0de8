#pragma once

#include "cylsim/config.hpp"

namespace cylsim {

/// One closed-loop run with cfg.gains; writes <out>/trace.csv and
/// <out>/summary.txt. Prints the summary to stdout.
void cmd_simulate(const RunConfig& cfg);

/// Gain search; writes <out>/ga_history.csv and <out>/best_gains.cfg and
/// prints generations used, convergence flag and the best fitness.
void cmd_optimize(const RunConfig& cfg);

/// Runs gains_a and gains_b on the identical disturbed config; writes
/// <out>/trace_a.csv, <out>/trace_b.csv and <out>/compare.txt with the
/// per-joint post-disturbance peak errors and the winner per joint.
/// Requires an enabled disturbance.
void cmd_compare(const RunConfig& cfg);

}  // namespace cylsim
