#pragma once

#include <map>

#include "fairrank/model.hpp"

namespace fairrank {

enum class ConstraintKind { DP, DT, DI, Dynamic, SourceTarget };

/// Per-candidate coefficient vector f with target c and tolerance eps,
/// enforced two-sided: |f^T P v - target| <= tolerance.
struct ConstraintVector {
  Vec f;
  double target = 0.0;
  double tolerance = 0.0;
  ConstraintKind kind = ConstraintKind::DP;
};

/// Group mean cumulative destination utilities at a snapshot time.
struct GroupUtilitySnapshot {
  std::map<int, double> mu;
  std::int64_t t = 0;
};

/// f_d = 1{d in Gk}/|Gk| - 1{d in Gk'}/|Gk'| over the candidate list.
ConstraintVector build_dp_vector(const GroupAssignment& groups, int k,
                                 int k_prime,
                                 const std::vector<MemberId>& candidates);

/// Exposure proportional to group mean utility:
/// f_d = 1{Gk}/(|Gk| Ubar(Gk)) - 1{Gk'}/(|Gk'| Ubar(Gk')).
ConstraintVector build_dt_vector(const GroupAssignment& groups, int k,
                                 int k_prime,
                                 const std::vector<MemberId>& candidates,
                                 const Vec& u);

/// Utility-weighted variant: f_d = u_d 1{Gk}/(|Gk| Ubar(Gk)) - ...
ConstraintVector build_di_vector(const GroupAssignment& groups, int k,
                                 int k_prime,
                                 const std::vector<MemberId>& candidates,
                                 const Vec& u);

/// Incremental multi-session constraint. Coefficients
/// u_d (1{Gk}/|Gk| - 1{Gk'}/|Gk'|); target (1 - rho^(T-t)) (mu_k - mu_k').
ConstraintVector build_dynamic_constraint(const GroupAssignment& groups, int k,
                                          int k_prime,
                                          const std::vector<MemberId>& candidates,
                                          const Vec& u,
                                          const GroupUtilitySnapshot& snapshot,
                                          double rho, std::int64_t now,
                                          double tolerance);

/// Tolerance for the exposure constraint: mean posBias over odd slots of
/// 1..m minus the mean over even slots.
double equality_of_opportunity_epsilon(int m);

/// Source-side target c_{k,k'} = acc(Gk') - rho^delta * acc(Gk).
double build_source_target(double group_k_acc, double group_k_prime_acc,
                           double rho, std::int64_t delta);

/// One DP constraint per group pair (k < k'), for K-group populations.
std::vector<ConstraintVector> build_all_dp_pairs(
    const GroupAssignment& groups, const std::vector<MemberId>& candidates,
    double tolerance);

}  // namespace fairrank
