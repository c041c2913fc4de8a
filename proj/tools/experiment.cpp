#include "experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fairrank {

namespace fs = std::filesystem;

std::vector<LabeledRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  fs::path dir = fs::path(spec.out_dir) / spec.scenario;
  fs::create_directories(dir);

  std::vector<LabeledRow> rows;
  for (Policy method : spec.methods) {
    SimConfig cfg = spec.sim;
    cfg.policy = method;
    if (method == Policy::Primal &&
        spec.primal_iterations < cfg.n_iterations)
      cfg.n_iterations = spec.primal_iterations;

    if (spec.replicates == 1) {
      SimResult result = run_simulation(cfg);
      std::ofstream log(dir / (std::string(policy_name(method)) + ".jsonl"));
      write_session_log(result.log, log);
      LabeledRow row;
      row.scenario = spec.scenario;
      row.method = policy_name(method);
      row.m_slots = cfg.m_slots;
      row.refresh = cfg.dual_refresh_epochs;
      row.seed = cfg.seed;
      row.metrics = compute_metrics(result.log);
      rows.push_back(std::move(row));
    } else {
      BootstrapSummary summary = bootstrap(cfg, spec.replicates);
      LabeledRow mean_row{spec.scenario, policy_name(method), cfg.m_slots,
                          cfg.dual_refresh_epochs, cfg.seed, summary.mean};
      LabeledRow hw_row{spec.scenario,
                        std::string(policy_name(method)) + ":halfwidth",
                        cfg.m_slots, cfg.dual_refresh_epochs, cfg.seed,
                        summary.half_width};
      rows.push_back(std::move(mean_row));
      rows.push_back(std::move(hw_row));
    }
  }

  std::ofstream csv(dir / (spec.replicates == 1 ? "metrics.csv"
                                                : "summary.csv"));
  emit_tables(rows, csv);
  std::ofstream cmp(dir / "comparison.txt");
  emit_comparison(rows, cmp);
  return rows;
}

}  // namespace fairrank
