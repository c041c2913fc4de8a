#pragma once

#include "fairrank/config.hpp"
#include "fairrank/metrics.hpp"

namespace fairrank {

/// Execute every method of the spec under the shared-seed protocol, write
/// per-method session logs plus the combined metric CSV under
/// out_dir/<scenario>/. Returns the labeled rows (single-run mode) for
/// display. Bootstrap mode (replicates > 1) writes summary.csv instead.
std::vector<LabeledRow> run_experiment(const ExperimentSpec& spec);

}  // namespace fairrank
