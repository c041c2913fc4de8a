#pragma once

#include <optional>

#include "fairrank/model.hpp"

namespace fairrank {

/// Fairness duals (one lambda per fairness constraint) plus per-slot duals.
struct DualVariables {
  Vec lambda;  // signed: upper-side dual minus lower-side dual
  Vec eta;

  double lambda1() const { return lambda.size() > 0 ? lambda(0) : 0.0; }
  double lambda2() const { return lambda.size() > 1 ? lambda(1) : 0.0; }
};

/// Snapshot of duals cached between refreshes of the per-member problem.
struct DualStore {
  DualVariables duals;
  std::int64_t refreshed_at = -1;
  double gamma = 0.0;

  bool initialized() const { return refreshed_at >= 0 && gamma > 0.0; }
};

/// Euclidean projection onto T_m = { y >= 0, sum(y) <= 1 }. Clip negatives;
/// if the clipped sum exceeds 1, project onto the unit-sum simplex by the
/// sort-and-threshold rule. O(m log m).
Vec project_simplex(const Vec& x);

/// Recover one candidate's policy row from cached duals:
/// p_d = Pi_T( (uv_d - sum_j lambda_j * terms_j,d - eta) / gamma ).
/// Each entry of `constraint_terms` is the candidate's (f.v) slice for the
/// constraint carrying the matching lambda.
Vec dual_to_primal(const Vec& uv_d, const std::vector<Vec>& constraint_terms,
                   const DualStore& store);

/// Deterministic slot filling: for each slot in order, pick the unassigned
/// candidate with the largest probability there; ties go to the lowest index.
SlotAssignment greedy_assign(const Mat& p_hat);

/// Score a session: per-candidate dual-to-primal rows stacked into P_hat,
/// then greedy assignment. `constraint_f` holds the per-candidate coefficient
/// vectors (length M each) of the constraints the duals were solved with.
SlotAssignment score_session(const Vec& u, const Vec& v,
                             const std::vector<Vec>& constraint_f,
                             const DualStore& store);

/// The stacked P_hat itself, for diagnostics and exposure measurements.
Mat score_session_matrix(const Vec& u, const Vec& v,
                         const std::vector<Vec>& constraint_f,
                         const DualStore& store);

}  // namespace fairrank
