#include "verify_suites.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fairrank/lp.hpp"
#include "fairrank/metrics.hpp"
#include "fairrank/sim.hpp"

namespace fairrank {
namespace {

SuiteResult check_simplex_projection() {
  SuiteResult res{"simplex-projection", true, ""};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200 && res.passed; ++trial) {
    int m = 1 + static_cast<int>(rng() % 8);
    Vec x(m);
    for (int i = 0; i < m; ++i) x(i) = unif(rng);
    Vec y = project_simplex(x);
    if (y.minCoeff() < -1e-12 || y.sum() > 1.0 + 1e-12) {
      res.passed = false;
      res.detail = "projection left the feasible set";
      break;
    }
    double dist = (y - x).squaredNorm();
    // No feasible probe may be closer than the claimed projection.
    for (int probe = 0; probe < 500; ++probe) {
      Vec q(m);
      double s = 0.0;
      for (int i = 0; i < m; ++i) {
        q(i) = unit(rng);
        s += q(i);
      }
      if (s > 1.0) q *= unit(rng) / s;
      if ((q - x).squaredNorm() < dist - 1e-10) {
        res.passed = false;
        res.detail = "a feasible probe beat the projection";
        break;
      }
    }
  }
  return res;
}

SuiteResult check_kkt() {
  SuiteResult res{"solver-kkt", true, ""};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 15 && res.passed; ++trial) {
    int M = 6 + static_cast<int>(rng() % 7);
    int m = 2 + static_cast<int>(rng() % 3);
    Vec u(M);
    std::vector<int> labels;
    for (int d = 0; d < M; ++d) {
      u(d) = unif(rng);
      labels.push_back(d % 2);
    }
    GroupAssignment groups(labels);
    std::vector<MemberId> cands;
    for (int d = 0; d < M; ++d) cands.push_back(d);
    ConstraintVector dp = build_dp_vector(groups, 0, 1, cands);
    dp.tolerance = 0.05;
    Vec v = position_bias_vector(m);
    AssembledProblem prob = assemble(u, v, {dp}, 0.01);
    Solution sol = solve(prob);
    KktReport rep = kkt_residuals(prob, sol);
    if (sol.status != SolveStatus::Optimal || rep.max() > 1e-6) {
      std::ostringstream os;
      os << "trial " << trial << " residual " << rep.max();
      res.passed = false;
      res.detail = os.str();
    }
  }
  return res;
}

SuiteResult check_ledger() {
  SuiteResult res{"ledger-oracle", true, ""};
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50 && res.passed; ++trial) {
    double rho = 0.2 + 0.8 * unif(rng);
    UtilityLedger ledger(rho);
    std::vector<std::pair<std::int64_t, double>> events;
    std::int64_t t = 0;
    for (int e = 0; e < 30; ++e) {
      t += static_cast<std::int64_t>(rng() % 4);
      double inc = unif(rng);
      ledger.update_dest_utility(0, inc, t);
      events.emplace_back(t, inc);
    }
    std::int64_t now = t + 2;
    double direct = 0.0;
    for (auto [ti, inc] : events)
      direct += std::pow(rho, static_cast<double>(now - ti)) * inc;
    if (std::abs(ledger.dest_utility(0, now) - direct) > 1e-9) {
      res.passed = false;
      res.detail = "lazy-discount value disagrees with the closed form";
    }
  }
  return res;
}

SuiteResult check_determinism() {
  SuiteResult res{"sim-determinism", true, ""};
  SimConfig cfg;
  cfg.n_members = 60;
  cfg.n_iterations = 25;
  cfg.m_slots = 5;
  cfg.d_eligible = 20;
  cfg.seed = 99;
  cfg.policy = Policy::DualNoDynamic;
  cfg.dual_refresh_epochs = 10;
  auto serialize = [](const SimConfig& c) {
    std::ostringstream os;
    write_session_log(run_simulation(c).log, os);
    return os.str();
  };
  if (serialize(cfg) != serialize(cfg)) {
    res.passed = false;
    res.detail = "two runs with one seed produced different logs";
    return res;
  }
  SimConfig other = cfg;
  other.policy = Policy::NoReranker;
  auto a = run_simulation(cfg).log;
  auto b = run_simulation(other).log;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].source != b[i].source) {
      res.passed = false;
      res.detail = "query sequence differs across policies";
      break;
    }
  }
  return res;
}

}  // namespace

std::vector<SuiteResult> run_verification_suites() {
  return {check_simplex_projection(), check_kkt(), check_ledger(),
          check_determinism()};
}

}  // namespace fairrank
