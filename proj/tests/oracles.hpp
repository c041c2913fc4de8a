#pragma once

// Independent reference implementations used only by tests. Each one takes a
// different algorithmic route than the library code it cross-checks.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fairrank/lp.hpp"

namespace fairrank::oracle {

// Explicit double sum for u^T P v.
inline double source_utility_double_sum(const Vec& u, const Mat& P,
                                        const Vec& v) {
  double acc = 0.0;
  for (Eigen::Index d = 0; d < P.rows(); ++d)
    for (Eigen::Index r = 0; r < P.cols(); ++r) acc += u(d) * P(d, r) * v(r);
  return acc;
}

// Projection onto T_m by bisection on the KKT threshold (no sorting).
inline Vec simplex_projection_bisection(const Vec& x) {
  Vec clipped = x.cwiseMax(0.0);
  if (clipped.sum() <= 1.0) return clipped;
  double lo = x.minCoeff() - 1.0, hi = x.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    double theta = 0.5 * (lo + hi);
    double s = (x.array() - theta).cwiseMax(0.0).sum();
    (s > 1.0 ? lo : hi) = theta;
  }
  double theta = 0.5 * (lo + hi);
  return (x.array() - theta).cwiseMax(0.0);
}

// Grid search for the projection of a 2-vector, step 1e-4.
inline Vec simplex_projection_grid2(const Vec& x) {
  double best0 = 0, best1 = 0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 10000; ++i) {
    double y0 = i * 1e-4;
    for (int j = 0; j + i <= 10000; ++j) {
      double y1 = j * 1e-4;
      double d = (y0 - x(0)) * (y0 - x(0)) + (y1 - x(1)) * (y1 - x(1));
      if (d < best) {
        best = d;
        best0 = y0;
        best1 = y1;
      }
    }
  }
  Vec y(2);
  y << best0, best1;
  return y;
}

// Quadratic-time greedy reference: per slot, sort the column and take the
// first unassigned candidate (stable order breaks ties toward low index).
inline std::vector<int> greedy_reference(const Mat& p_hat) {
  const int M = static_cast<int>(p_hat.rows());
  const int m = static_cast<int>(p_hat.cols());
  std::vector<int> result;
  std::vector<bool> used(static_cast<size_t>(M), false);
  for (int r = 0; r < m; ++r) {
    std::vector<int> idx(static_cast<size_t>(M));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return p_hat(a, r) > p_hat(b, r);
    });
    for (int d : idx) {
      if (!used[static_cast<size_t>(d)]) {
        used[static_cast<size_t>(d)] = true;
        result.push_back(d);
        break;
      }
    }
  }
  return result;
}

// Exhaustive vertex enumeration for the linear program
//   max z^T p  s.t.  S p = 1, p >= 0, block sums <= 1, |a_j^T p - c_j|<=eps_j
// Every vertex is m equality rows plus (M*m - m) active inequalities.
inline double lp_vertex_value(const AssembledProblem& prob) {
  const int M = prob.M, m = prob.m;
  const int n = M * m;
  std::vector<Vec> ineq_a;
  std::vector<double> ineq_b;  // a^T p <= b
  for (int i = 0; i < n; ++i) {
    Vec a = Vec::Zero(n);
    a(i) = -1.0;
    ineq_a.push_back(a);
    ineq_b.push_back(0.0);
  }
  for (int d = 0; d < M; ++d) {
    Vec a = Vec::Zero(n);
    a.segment(static_cast<Eigen::Index>(d) * m, m).setOnes();
    ineq_a.push_back(a);
    ineq_b.push_back(1.0);
  }
  for (std::size_t j = 0; j < prob.fairness.size(); ++j) {
    Vec row = prob.fairness_row(j);
    const ConstraintVector& c = prob.fairness[j];
    ineq_a.push_back(row);
    ineq_b.push_back(c.target + c.tolerance);
    ineq_a.push_back(-row);
    ineq_b.push_back(-(c.target - c.tolerance));
  }

  const int n_ineq = static_cast<int>(ineq_a.size());
  const int pick = n - m;
  double best = -std::numeric_limits<double>::infinity();

  std::vector<int> combo(static_cast<size_t>(pick));
  std::iota(combo.begin(), combo.end(), 0);
  Mat A(n, n);
  Vec b(n);
  while (true) {
    for (int r = 0; r < m; ++r) {
      A.row(r).setZero();
      for (int d = 0; d < M; ++d) A(r, d * m + r) = 1.0;
      b(r) = 1.0;
    }
    for (int k = 0; k < pick; ++k) {
      A.row(m + k) = ineq_a[static_cast<size_t>(combo[static_cast<size_t>(k)])]
                         .transpose();
      b(m + k) = ineq_b[static_cast<size_t>(combo[static_cast<size_t>(k)])];
    }
    Eigen::FullPivLU<Mat> lu(A);
    if (lu.isInvertible()) {
      Vec p = lu.solve(b);
      bool feasible = true;
      for (int i = 0; i < n_ineq && feasible; ++i)
        if (ineq_a[static_cast<size_t>(i)].dot(p) >
            ineq_b[static_cast<size_t>(i)] + 1e-9)
          feasible = false;
      if (feasible) best = std::max(best, prob.z.dot(p));
    }

    int i = pick - 1;
    while (i >= 0 && combo[static_cast<size_t>(i)] == n_ineq - pick + i) --i;
    if (i < 0) break;
    ++combo[static_cast<size_t>(i)];
    for (int k = i + 1; k < pick; ++k)
      combo[static_cast<size_t>(k)] = combo[static_cast<size_t>(k - 1)] + 1;
  }
  return best;
}

// Projected gradient on the regularized objective with a Dykstra projection
// onto the intersection of the block simplexes, the slot equalities and the
// fairness bands. Independent of the dual-ascent path.
inline Vec projected_gradient_qp(const AssembledProblem& prob, int steps) {
  const int M = prob.M, m = prob.m;
  const int n = M * m;
  const std::size_t J = prob.fairness.size();
  std::vector<Vec> rows(J);
  std::vector<double> row_n2(J);
  for (std::size_t j = 0; j < J; ++j) {
    rows[j] = prob.fairness_row(j);
    row_n2[j] = rows[j].squaredNorm();
  }

  const std::size_t n_sets = 2 + J;
  auto project_set = [&](std::size_t s, const Vec& p) -> Vec {
    if (s == 0) {  // block simplexes
      Vec out(n);
      for (int d = 0; d < M; ++d)
        out.segment(static_cast<Eigen::Index>(d) * m, m) =
            simplex_projection_bisection(
                p.segment(static_cast<Eigen::Index>(d) * m, m));
      return out;
    }
    if (s == 1) {  // slot equalities: S S^T = M I
      Vec col_sum = Vec::Zero(m);
      for (int d = 0; d < M; ++d)
        col_sum += p.segment(static_cast<Eigen::Index>(d) * m, m);
      Vec corr = (Vec::Ones(m) - col_sum) / static_cast<double>(M);
      Vec out = p;
      for (int d = 0; d < M; ++d)
        out.segment(static_cast<Eigen::Index>(d) * m, m) += corr;
      return out;
    }
    std::size_t j = s - 2;  // fairness band
    const ConstraintVector& c = prob.fairness[j];
    double val = rows[j].dot(p);
    double lo = c.target - c.tolerance, hi = c.target + c.tolerance;
    if (val > hi) return p - ((val - hi) / row_n2[j]) * rows[j];
    if (val < lo) return p + ((lo - val) / row_n2[j]) * rows[j];
    return p;
  };

  auto project_intersection = [&](Vec p) -> Vec {
    std::vector<Vec> increments(n_sets, Vec::Zero(n));
    for (int sweep = 0; sweep < 400; ++sweep) {
      Vec before = p;
      for (std::size_t s = 0; s < n_sets; ++s) {
        Vec y = project_set(s, p + increments[s]);
        increments[s] = p + increments[s] - y;
        p = y;
      }
      if ((p - before).lpNorm<Eigen::Infinity>() < 1e-13) break;
    }
    return p;
  };

  Vec p = project_intersection(Vec::Constant(n, 1.0 / M));
  const double step = 1.0 / (prob.gamma + 1.0);
  for (int it = 0; it < steps; ++it) {
    Vec grad = prob.z - prob.gamma * p;
    p = project_intersection(p + step * grad);
  }
  return p;
}

}  // namespace fairrank::oracle
