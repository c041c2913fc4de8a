#include "fairrank/config.hpp"

#include <fstream>

#include <json.hpp>

namespace fairrank {

using nlohmann::json;

void ExperimentSpec::validate() const {
  sim.validate();
  if (methods.empty()) throw DomainError("spec.methods: at least one method");
  if (replicates < 1) throw DomainError("spec.replicates: must be >= 1");
  if (primal_iterations < 0)
    throw DomainError("spec.primal_iterations: negative");
  if (out_dir.empty()) throw DomainError("spec.out_dir: empty path");
}

namespace {

json sim_to_json(const SimConfig& c) {
  return json{{"n_members", c.n_members},
              {"n_iterations", c.n_iterations},
              {"m_slots", c.m_slots},
              {"d_eligible", c.d_eligible},
              {"p0_group_fraction", c.p0_group_fraction},
              {"d_cov", c.d_cov},
              {"sigma2", c.sigma2},
              {"p00", c.p00},
              {"p11", c.p11},
              {"p01", c.p01},
              {"p_base", c.p_base},
              {"score_ratio_target", c.score_ratio_target},
              {"policy", policy_name(c.policy)},
              {"dual_refresh_epochs", c.dual_refresh_epochs},
              {"gamma", c.gamma},
              {"rho", c.rho},
              {"dynamic_tolerance", c.dynamic_tolerance},
              {"exposure_tolerance", c.exposure_tolerance},
              {"solver_tolerance", c.solver_tolerance},
              {"solver_max_iterations", c.solver_max_iterations},
              {"seed", c.seed}};
}

template <typename T>
void read_field(const json& j, const char* key, T& out,
                const std::string& path) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DomainError(path + "." + key + ": wrong type");
  }
}

SimConfig sim_from_json(const json& j, const std::string& path) {
  SimConfig c;
  read_field(j, "n_members", c.n_members, path);
  read_field(j, "n_iterations", c.n_iterations, path);
  read_field(j, "m_slots", c.m_slots, path);
  read_field(j, "d_eligible", c.d_eligible, path);
  read_field(j, "p0_group_fraction", c.p0_group_fraction, path);
  read_field(j, "d_cov", c.d_cov, path);
  read_field(j, "sigma2", c.sigma2, path);
  read_field(j, "p00", c.p00, path);
  read_field(j, "p11", c.p11, path);
  read_field(j, "p01", c.p01, path);
  read_field(j, "p_base", c.p_base, path);
  read_field(j, "score_ratio_target", c.score_ratio_target, path);
  if (j.contains("policy"))
    c.policy = policy_from_name(j.at("policy").get<std::string>());
  read_field(j, "dual_refresh_epochs", c.dual_refresh_epochs, path);
  read_field(j, "gamma", c.gamma, path);
  read_field(j, "rho", c.rho, path);
  read_field(j, "dynamic_tolerance", c.dynamic_tolerance, path);
  read_field(j, "exposure_tolerance", c.exposure_tolerance, path);
  read_field(j, "solver_tolerance", c.solver_tolerance, path);
  read_field(j, "solver_max_iterations", c.solver_max_iterations, path);
  read_field(j, "seed", c.seed, path);
  return c;
}

}  // namespace

std::string spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["sim"] = sim_to_json(spec.sim);
  std::vector<std::string> methods;
  for (Policy p : spec.methods) methods.emplace_back(policy_name(p));
  j["methods"] = methods;
  j["replicates"] = spec.replicates;
  j["primal_iterations"] = spec.primal_iterations;
  j["out_dir"] = spec.out_dir;
  j["scenario"] = spec.scenario;
  return j.dump(2);
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DomainError("config: parse error in " + path + ": " + e.what());
  }
  ExperimentSpec spec;
  if (j.contains("sim")) spec.sim = sim_from_json(j.at("sim"), "sim");
  if (j.contains("methods")) {
    spec.methods.clear();
    for (const auto& name : j.at("methods"))
      spec.methods.push_back(policy_from_name(name.get<std::string>()));
  }
  read_field(j, "replicates", spec.replicates, "spec");
  read_field(j, "primal_iterations", spec.primal_iterations, "spec");
  read_field(j, "out_dir", spec.out_dir, "spec");
  read_field(j, "scenario", spec.scenario, "spec");
  return spec;
}

void save_spec(const ExperimentSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("config: cannot write " + path);
  out << spec_to_json(spec) << '\n';
}

ExperimentSpec builtin_scenario(const std::string& name) {
  ExperimentSpec spec;
  spec.scenario = name;
  if (name == "table1-s1" || name == "bootstrap-s1") {
    spec.sim.m_slots = 10;
    spec.sim.dual_refresh_epochs = 50;
  } else if (name == "table1-s2" || name == "bootstrap-s2") {
    spec.sim.m_slots = 20;
    spec.sim.dual_refresh_epochs = 50;
  } else if (name == "table1-s3" || name == "bootstrap-s3") {
    spec.sim.m_slots = 20;
    spec.sim.dual_refresh_epochs = 20;
  } else {
    throw DomainError("unknown scenario: " + name);
  }
  if (name.rfind("bootstrap-", 0) == 0) spec.replicates = 100;
  return spec;
}

}  // namespace fairrank
