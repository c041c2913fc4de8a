#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "verify_suites.hpp"

using namespace fairrank;

int main(int argc, char** argv) {
  CLI::App app{"fairness-constrained marketplace re-ranking experiments"};
  app.require_subcommand(1);

  std::string config_path, scenario, out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  int replicates = 0, iterations = 0, slots = 0, refresh = 0;
  std::vector<std::string> methods;

  CLI::App* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", config_path, "JSON experiment config");
  run->add_option("--scenario", scenario,
                  "built-in scenario (table1-s1/s2/s3, bootstrap-s1/s2/s3)");
  run->add_option("--seed", seed, "base seed")->each([&](const std::string&) {
    have_seed = true;
  });
  run->add_option("--replicates", replicates, "replicate count");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--method", methods, "policy to run (repeatable)");
  run->add_option("--iterations", iterations, "simulation iterations");
  run->add_option("--slots", slots, "shown slots m");
  run->add_option("--refresh", refresh, "dual refresh epochs");

  CLI::App* verify = app.add_subcommand("verify", "run the property suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentSpec spec;
      if (!scenario.empty())
        spec = builtin_scenario(scenario);
      else if (!config_path.empty())
        spec = load_spec(config_path);
      if (!config_path.empty() && !scenario.empty()) {
        std::cerr << "use either --config or --scenario, not both\n";
        return 2;
      }
      if (have_seed) spec.sim.seed = seed;
      if (replicates > 0) spec.replicates = replicates;
      if (!out_dir.empty()) spec.out_dir = out_dir;
      if (iterations > 0) spec.sim.n_iterations = iterations;
      if (slots > 0) spec.sim.m_slots = slots;
      if (refresh > 0) spec.sim.dual_refresh_epochs = refresh;
      if (!methods.empty()) {
        spec.methods.clear();
        for (const std::string& name : methods)
          spec.methods.push_back(policy_from_name(name));
      }
      std::vector<LabeledRow> rows = run_experiment(spec);
      emit_comparison(rows, std::cout);
      std::cout << "wrote " << spec.out_dir << "/" << spec.scenario << "\n";
      return 0;
    }

    if (verify->parsed()) {
      bool all = true;
      for (const SuiteResult& r : run_verification_suites()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
        all = all && r.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
