#include "fairrank/constraints.hpp"

#include <cmath>

namespace fairrank {
namespace {

struct GroupSlice {
  std::vector<int> positions;  // indices into the candidate list
  double mean_utility = 0.0;
};

GroupSlice slice(const GroupAssignment& groups, int g,
                 const std::vector<MemberId>& candidates, const Vec* u) {
  GroupSlice s;
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (groups.label(candidates[i]) == g) {
      s.positions.push_back(static_cast<int>(i));
      if (u) total += (*u)(static_cast<Eigen::Index>(i));
    }
  }
  if (s.positions.empty())
    throw DomainError("group has no members among the candidates");
  if (u) s.mean_utility = total / static_cast<double>(s.positions.size());
  return s;
}

}  // namespace

ConstraintVector build_dp_vector(const GroupAssignment& groups, int k,
                                 int k_prime,
                                 const std::vector<MemberId>& candidates) {
  GroupSlice gk = slice(groups, k, candidates, nullptr);
  GroupSlice gkp = slice(groups, k_prime, candidates, nullptr);
  ConstraintVector c;
  c.kind = ConstraintKind::DP;
  c.f = Vec::Zero(static_cast<Eigen::Index>(candidates.size()));
  for (int i : gk.positions) c.f(i) += 1.0 / gk.positions.size();
  for (int i : gkp.positions) c.f(i) -= 1.0 / gkp.positions.size();
  return c;
}

ConstraintVector build_dt_vector(const GroupAssignment& groups, int k,
                                 int k_prime,
                                 const std::vector<MemberId>& candidates,
                                 const Vec& u) {
  if (u.size() != static_cast<Eigen::Index>(candidates.size()))
    throw ShapeError("utility length does not match candidate list");
  GroupSlice gk = slice(groups, k, candidates, &u);
  GroupSlice gkp = slice(groups, k_prime, candidates, &u);
  if (gk.mean_utility <= 0.0 || gkp.mean_utility <= 0.0)
    throw DomainError("group mean utility must be positive");
  ConstraintVector c;
  c.kind = ConstraintKind::DT;
  c.f = Vec::Zero(static_cast<Eigen::Index>(candidates.size()));
  for (int i : gk.positions)
    c.f(i) += 1.0 / (gk.positions.size() * gk.mean_utility);
  for (int i : gkp.positions)
    c.f(i) -= 1.0 / (gkp.positions.size() * gkp.mean_utility);
  return c;
}

ConstraintVector build_di_vector(const GroupAssignment& groups, int k,
                                 int k_prime,
                                 const std::vector<MemberId>& candidates,
                                 const Vec& u) {
  if (u.size() != static_cast<Eigen::Index>(candidates.size()))
    throw ShapeError("utility length does not match candidate list");
  GroupSlice gk = slice(groups, k, candidates, &u);
  GroupSlice gkp = slice(groups, k_prime, candidates, &u);
  if (gk.mean_utility <= 0.0 || gkp.mean_utility <= 0.0)
    throw DomainError("group mean utility must be positive");
  ConstraintVector c;
  c.kind = ConstraintKind::DI;
  c.f = Vec::Zero(static_cast<Eigen::Index>(candidates.size()));
  for (int i : gk.positions)
    c.f(i) += u(i) / (gk.positions.size() * gk.mean_utility);
  for (int i : gkp.positions)
    c.f(i) -= u(i) / (gkp.positions.size() * gkp.mean_utility);
  return c;
}

ConstraintVector build_dynamic_constraint(const GroupAssignment& groups, int k,
                                          int k_prime,
                                          const std::vector<MemberId>& candidates,
                                          const Vec& u,
                                          const GroupUtilitySnapshot& snapshot,
                                          double rho, std::int64_t now,
                                          double tolerance) {
  if (u.size() != static_cast<Eigen::Index>(candidates.size()))
    throw ShapeError("utility length does not match candidate list");
  if (now < snapshot.t) throw DomainError("constraint time precedes snapshot");
  auto mu_k = snapshot.mu.find(k);
  auto mu_kp = snapshot.mu.find(k_prime);
  if (mu_k == snapshot.mu.end() || mu_kp == snapshot.mu.end())
    throw DomainError("snapshot missing a group mean");
  GroupSlice gk = slice(groups, k, candidates, nullptr);
  GroupSlice gkp = slice(groups, k_prime, candidates, nullptr);

  ConstraintVector c;
  c.kind = ConstraintKind::Dynamic;
  c.f = Vec::Zero(static_cast<Eigen::Index>(candidates.size()));
  for (int i : gk.positions) c.f(i) += u(i) / gk.positions.size();
  for (int i : gkp.positions) c.f(i) -= u(i) / gkp.positions.size();
  double decay = std::pow(rho, static_cast<double>(now - snapshot.t));
  c.target = (1.0 - decay) * (mu_k->second - mu_kp->second);
  c.tolerance = tolerance;
  return c;
}

double equality_of_opportunity_epsilon(int m) {
  if (m < 2) throw DomainError("epsilon needs at least two slots");
  double odd = 0.0, even = 0.0;
  int n_odd = 0, n_even = 0;
  for (int kk = 1; kk <= m; ++kk) {
    if (kk % 2 == 1) {
      odd += position_bias(kk);
      ++n_odd;
    } else {
      even += position_bias(kk);
      ++n_even;
    }
  }
  return odd / n_odd - even / n_even;
}

double build_source_target(double group_k_acc, double group_k_prime_acc,
                           double rho, std::int64_t delta) {
  return group_k_prime_acc -
         std::pow(rho, static_cast<double>(delta)) * group_k_acc;
}

std::vector<ConstraintVector> build_all_dp_pairs(
    const GroupAssignment& groups, const std::vector<MemberId>& candidates,
    double tolerance) {
  std::vector<ConstraintVector> out;
  for (int k = 0; k < groups.num_groups(); ++k) {
    for (int kp = k + 1; kp < groups.num_groups(); ++kp) {
      ConstraintVector c = build_dp_vector(groups, k, kp, candidates);
      c.tolerance = tolerance;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace fairrank
