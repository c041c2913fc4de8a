#include "fairrank/scorer.hpp"

#include <algorithm>
#include <numeric>

namespace fairrank {

Vec project_simplex(const Vec& x) {
  const Eigen::Index m = x.size();
  Vec clipped = x.cwiseMax(0.0);
  if (clipped.sum() <= 1.0) return clipped;

  // On the sum==1 face: standard threshold projection of x onto the simplex.
  std::vector<double> sorted(x.data(), x.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  int support = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    cumsum += sorted[static_cast<size_t>(i)];
    double candidate = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<size_t>(i)] - candidate > 0.0) {
      theta = candidate;
      support = static_cast<int>(i + 1);
    }
  }
  (void)support;
  return (x.array() - theta).cwiseMax(0.0);
}

Vec dual_to_primal(const Vec& uv_d, const std::vector<Vec>& constraint_terms,
                   const DualStore& store) {
  if (!store.initialized())
    throw DomainError("dual store has not been refreshed");
  if (store.duals.eta.size() != uv_d.size())
    throw ShapeError("eta length does not match slot count");
  Vec pre = uv_d - store.duals.eta;
  for (std::size_t j = 0; j < constraint_terms.size(); ++j) {
    double lambda = j < static_cast<std::size_t>(store.duals.lambda.size())
                        ? store.duals.lambda(static_cast<Eigen::Index>(j))
                        : 0.0;
    pre -= lambda * constraint_terms[j];
  }
  return project_simplex(pre / store.gamma);
}

SlotAssignment greedy_assign(const Mat& p_hat) {
  const int M = static_cast<int>(p_hat.rows());
  const int m = static_cast<int>(p_hat.cols());
  if (M < m) throw DomainError("fewer candidates than slots");
  SlotAssignment out;
  out.member_at_slot.reserve(static_cast<size_t>(m));
  std::vector<bool> taken(static_cast<size_t>(M), false);
  for (int r = 0; r < m; ++r) {
    int best = -1;
    for (int d = 0; d < M; ++d) {
      if (taken[static_cast<size_t>(d)]) continue;
      if (best < 0 || p_hat(d, r) > p_hat(best, r)) best = d;
    }
    taken[static_cast<size_t>(best)] = true;
    out.member_at_slot.push_back(best);
  }
  return out;
}

Mat score_session_matrix(const Vec& u, const Vec& v,
                         const std::vector<Vec>& constraint_f,
                         const DualStore& store) {
  const int M = static_cast<int>(u.size());
  const int m = static_cast<int>(v.size());
  Mat p_hat(M, m);
  std::vector<Vec> terms(constraint_f.size());
  for (int d = 0; d < M; ++d) {
    for (std::size_t j = 0; j < constraint_f.size(); ++j)
      terms[j] = constraint_f[j](d) * v;
    p_hat.row(d) = dual_to_primal(u(d) * v, terms, store).transpose();
  }
  return p_hat;
}

SlotAssignment score_session(const Vec& u, const Vec& v,
                             const std::vector<Vec>& constraint_f,
                             const DualStore& store) {
  return greedy_assign(score_session_matrix(u, v, constraint_f, store));
}

}  // namespace fairrank
