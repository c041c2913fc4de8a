#pragma once

#include <string>

#include "fairrank/sim.hpp"

namespace fairrank {

/// A full experiment: one SimConfig plus orchestration fields.
struct ExperimentSpec {
  SimConfig sim;
  std::vector<Policy> methods = {Policy::NoReranker, Policy::Primal,
                                 Policy::DualNoDynamic,
                                 Policy::DualWithDynamic};
  int replicates = 1;
  int primal_iterations = 100;  // reduced budget for the per-session solver
  std::string out_dir = "out";
  std::string scenario = "custom";

  void validate() const;
};

ExperimentSpec load_spec(const std::string& path);
std::string spec_to_json(const ExperimentSpec& spec);
void save_spec(const ExperimentSpec& spec, const std::string& path);

/// Built-in scenarios: table1-s1 (m=10, refresh=50), table1-s2 (m=20,
/// refresh=50), table1-s3 (m=20, refresh=20), and bootstrap-s1/-s2/-s3
/// (same settings, 100 replicates).
ExperimentSpec builtin_scenario(const std::string& name);

}  // namespace fairrank
