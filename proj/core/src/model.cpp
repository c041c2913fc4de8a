#include "fairrank/model.hpp"

#include <algorithm>
#include <cmath>

namespace fairrank {

GroupAssignment::GroupAssignment(std::vector<int> labels)
    : labels_(std::move(labels)) {
  for (int g : labels_) {
    if (g < 0) throw DomainError("group labels must be non-negative");
    num_groups_ = std::max(num_groups_, g + 1);
  }
  groups_.resize(static_cast<size_t>(num_groups_));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    groups_[static_cast<size_t>(labels_[i])].push_back(
        static_cast<MemberId>(i));
  }
}

const std::vector<MemberId>& GroupAssignment::members_of(int group) const {
  if (group < 0 || group >= num_groups_)
    throw DomainError("unknown group id");
  return groups_[static_cast<size_t>(group)];
}

double position_bias(int k) {
  if (k < 1) throw DomainError("slot index must be >= 1");
  return 1.0 / (1.0 + std::log(static_cast<double>(k)));
}

Vec position_bias_vector(int m) {
  Vec v(m);
  for (int k = 1; k <= m; ++k) v(k - 1) = position_bias(k);
  return v;
}

Vec RankingPolicy::vectorized() const {
  const int M = candidates(), m = slots();
  Vec p(static_cast<Eigen::Index>(M) * m);
  for (int d = 0; d < M; ++d)
    p.segment(static_cast<Eigen::Index>(d) * m, m) = P.row(d).transpose();
  return p;
}

RankingPolicy RankingPolicy::from_vector(const Vec& p, int M, int m) {
  if (p.size() != static_cast<Eigen::Index>(M) * m)
    throw ShapeError("vector length does not match M*m");
  RankingPolicy policy;
  policy.P.resize(M, m);
  for (int d = 0; d < M; ++d)
    policy.P.row(d) = p.segment(static_cast<Eigen::Index>(d) * m, m).transpose();
  return policy;
}

bool RankingPolicy::is_valid(double tol) const {
  if (P.minCoeff() < -tol || P.maxCoeff() > 1.0 + tol) return false;
  for (int r = 0; r < slots(); ++r)
    if (std::abs(P.col(r).sum() - 1.0) > tol) return false;
  for (int d = 0; d < candidates(); ++d)
    if (P.row(d).sum() > 1.0 + tol) return false;
  return true;
}

double expected_source_utility(const Vec& u, const RankingPolicy& policy,
                               const Vec& v) {
  if (u.size() != policy.P.rows() || v.size() != policy.P.cols())
    throw ShapeError("utility/policy/bias dimensions disagree");
  return u.dot(policy.P * v);
}

double expected_dest_utility(double u_sd, const Vec& p_row, const Vec& v) {
  if (p_row.size() != v.size())
    throw ShapeError("row/bias dimensions disagree");
  return u_sd * p_row.dot(v);
}

}  // namespace fairrank
