#pragma once

#include "fairrank/constraints.hpp"
#include "fairrank/scorer.hpp"

namespace fairrank {

/// The per-member problem in vectorized form:
///   maximize p^T z - (gamma/2) p^T p
///   subject to per-candidate rows in T_m, slot equalities
///   [I_m : ... : I_m] p = 1, and |a_j^T p - c_j| <= eps_j for each
///   fairness constraint, where a_j(d,r) = f_j(d) * v(r).
struct AssembledProblem {
  Vec u;
  Vec v;
  Vec z;  // z[(d,r)] = u_d * v_r, candidate-major
  std::vector<ConstraintVector> fairness;
  double gamma = 0.01;
  int M = 0;
  int m = 0;

  /// Expanded coefficient row of fairness constraint j over p.
  Vec fairness_row(std::size_t j) const;
  double fairness_value(std::size_t j, const Vec& p) const;
};

AssembledProblem assemble(const Vec& u, const Vec& v,
                          std::vector<ConstraintVector> constraints,
                          double gamma);

enum class SolveStatus { Optimal, Infeasible, IterLimit };

struct SolverOptions {
  int max_iterations = 100000;
  double tolerance = 1e-9;        // dual (projected-gradient) residual
  double divergence_bound = 1e8;  // dual norm certifying infeasibility
  std::optional<DualVariables> warm_start;
};

struct Solution {
  Vec p;
  DualVariables duals;
  Vec alpha;  // upper-side fairness duals (>= 0)
  Vec beta;   // lower-side fairness duals (>= 0)
  double objective = 0.0;
  SolveStatus status = SolveStatus::Optimal;
  int iterations = 0;

  RankingPolicy policy(int M, int m) const {
    return RankingPolicy::from_vector(p, M, m);
  }
};

/// Dual ascent: the primal block solution is the simplex projection of an
/// affine function of the duals; the duals follow accelerated projected
/// gradient steps on the (smooth) dual function.
Solution solve(const AssembledProblem& problem, const SolverOptions& opts = {});

struct KktReport {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;

  double max() const {
    return std::max({stationarity, feasibility, complementarity});
  }
};

KktReport kkt_residuals(const AssembledProblem& problem,
                        const Solution& solution);

/// Source-fair variant: minimize sum_k |z^T p - c_k| over the same feasible
/// set, via epigraph variables; small quadratic terms keep the solution
/// unique. Reported objective is sum_k |z^T p - c_k| at the solution.
Solution solve_source_fair(const AssembledProblem& problem,
                           const std::vector<double>& source_targets,
                           const SolverOptions& opts = {});

/// Plain-text diagnostic dump (dimensions, status, duals, p) for fixtures.
std::string dump_solution(const AssembledProblem& problem,
                          const Solution& solution);

}  // namespace fairrank
