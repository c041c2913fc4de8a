#include "fairrank/lp.hpp"

#include <cmath>
#include <sstream>

namespace fairrank {

Vec AssembledProblem::fairness_row(std::size_t j) const {
  const ConstraintVector& c = fairness.at(j);
  Vec row(static_cast<Eigen::Index>(M) * m);
  for (int d = 0; d < M; ++d)
    row.segment(static_cast<Eigen::Index>(d) * m, m) = c.f(d) * v;
  return row;
}

double AssembledProblem::fairness_value(std::size_t j, const Vec& p) const {
  const ConstraintVector& c = fairness.at(j);
  double acc = 0.0;
  for (int d = 0; d < M; ++d)
    acc += c.f(d) * p.segment(static_cast<Eigen::Index>(d) * m, m).dot(v);
  return acc;
}

AssembledProblem assemble(const Vec& u, const Vec& v,
                          std::vector<ConstraintVector> constraints,
                          double gamma) {
  AssembledProblem prob;
  prob.M = static_cast<int>(u.size());
  prob.m = static_cast<int>(v.size());
  if (prob.M < prob.m || prob.m < 1)
    throw ShapeError("need M >= m >= 1 to fill every slot");
  if (gamma <= 0.0) throw DomainError("gamma must be positive");
  for (const ConstraintVector& c : constraints) {
    if (c.f.size() != u.size())
      throw ShapeError("constraint coefficient length does not match M");
    if (c.tolerance < 0.0) throw DomainError("constraint tolerance < 0");
  }
  prob.u = u;
  prob.v = v;
  prob.gamma = gamma;
  prob.fairness = std::move(constraints);
  prob.z.resize(static_cast<Eigen::Index>(prob.M) * prob.m);
  for (int d = 0; d < prob.M; ++d)
    prob.z.segment(static_cast<Eigen::Index>(d) * prob.m, prob.m) = u(d) * v;
  return prob;
}

namespace {

// Block solution for a given dual point: p_d = Pi_T((w_d * v - eta) / gamma)
// where w_d = u_d - sum_j nu_j f_j(d). Also accumulates slot column sums and
// per-constraint values a_j^T p.
struct PrimalEval {
  Vec p;
  Vec col_sum;   // length m
  Vec fair_val;  // length J
};

PrimalEval eval_primal(const AssembledProblem& prob, const Vec& eta,
                       const Vec& nu) {
  const int M = prob.M, m = prob.m;
  const std::size_t J = prob.fairness.size();
  PrimalEval out;
  out.p.resize(static_cast<Eigen::Index>(M) * m);
  out.col_sum = Vec::Zero(m);
  out.fair_val = Vec::Zero(static_cast<Eigen::Index>(J));
  Vec w = prob.u;
  for (std::size_t j = 0; j < J; ++j)
    w -= nu(static_cast<Eigen::Index>(j)) * prob.fairness[j].f;
  for (int d = 0; d < M; ++d) {
    Vec pre = (w(d) * prob.v - eta) / prob.gamma;
    Vec pd = project_simplex(pre);
    out.p.segment(static_cast<Eigen::Index>(d) * m, m) = pd;
    out.col_sum += pd;
    double exposure = pd.dot(prob.v);
    for (std::size_t j = 0; j < J; ++j)
      out.fair_val(static_cast<Eigen::Index>(j)) +=
          prob.fairness[j].f(d) * exposure;
  }
  return out;
}

double dual_residual(const AssembledProblem& prob, const PrimalEval& ev,
                     const Vec& alpha, const Vec& beta) {
  double r = (ev.col_sum.array() - 1.0).abs().maxCoeff();
  for (std::size_t j = 0; j < prob.fairness.size(); ++j) {
    const ConstraintVector& c = prob.fairness[j];
    const auto ji = static_cast<Eigen::Index>(j);
    double up = ev.fair_val(ji) - (c.target + c.tolerance);
    double lo = (c.target - c.tolerance) - ev.fair_val(ji);
    r = std::max(r, alpha(ji) > 0.0 ? std::abs(up) : std::max(0.0, up));
    r = std::max(r, beta(ji) > 0.0 ? std::abs(lo) : std::max(0.0, lo));
  }
  return r;
}

}  // namespace

Solution solve(const AssembledProblem& prob, const SolverOptions& opts) {
  const int m = prob.m;
  const std::size_t J = prob.fairness.size();
  const Eigen::Index n_dual = m + 2 * static_cast<Eigen::Index>(J);

  // Lipschitz bound for the dual gradient: slot rows contribute M (disjoint
  // supports), each two-sided fairness row contributes 2 |f|^2 |v|^2.
  double lip = static_cast<double>(prob.M);
  for (const ConstraintVector& c : prob.fairness)
    lip += 2.0 * c.f.squaredNorm() * prob.v.squaredNorm();
  const double step = prob.gamma / lip;

  Vec x = Vec::Zero(n_dual);
  if (opts.warm_start) {
    x.head(m) = opts.warm_start->eta;
    for (std::size_t j = 0; j < J && j < static_cast<std::size_t>(
                                            opts.warm_start->lambda.size());
         ++j) {
      const auto ji = static_cast<Eigen::Index>(j);
      double l = opts.warm_start->lambda(ji);
      x(m + 2 * ji) = std::max(0.0, l);
      x(m + 2 * ji + 1) = std::max(0.0, -l);
    }
  }
  Vec y = x, x_prev = x;
  double momentum = 1.0;

  auto unpack = [&](const Vec& d, Vec& eta, Vec& alpha, Vec& beta, Vec& nu) {
    eta = d.head(m);
    alpha.resize(static_cast<Eigen::Index>(J));
    beta.resize(static_cast<Eigen::Index>(J));
    for (std::size_t j = 0; j < J; ++j) {
      const auto ji = static_cast<Eigen::Index>(j);
      alpha(ji) = d(m + 2 * ji);
      beta(ji) = d(m + 2 * ji + 1);
    }
    nu = alpha - beta;
  };

  Solution best;
  double best_res = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::IterLimit;
  int iters = 0;

  Vec eta, alpha, beta, nu, grad(n_dual);
  for (iters = 0; iters < opts.max_iterations; ++iters) {
    unpack(y, eta, alpha, beta, nu);
    PrimalEval ev = eval_primal(prob, eta, nu);

    grad.head(m) = ev.col_sum.array() - 1.0;  // ascent direction on eta
    for (std::size_t j = 0; j < J; ++j) {
      const ConstraintVector& c = prob.fairness[j];
      const auto ji = static_cast<Eigen::Index>(j);
      grad(m + 2 * ji) = ev.fair_val(ji) - (c.target + c.tolerance);
      grad(m + 2 * ji + 1) = (c.target - c.tolerance) - ev.fair_val(ji);
    }

    Vec x_new = y + step * grad;
    for (Eigen::Index i = m; i < n_dual; ++i)
      x_new(i) = std::max(0.0, x_new(i));

    // Gradient-based adaptive restart for the momentum sequence.
    if (grad.dot(x_new - x_prev) < 0.0) {
      momentum = 1.0;
      y = x_new;
    } else {
      double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = x_new + ((momentum - 1.0) / next) * (x_new - x_prev);
      for (Eigen::Index i = m; i < n_dual; ++i) y(i) = std::max(0.0, y(i));
      momentum = next;
    }
    x_prev = x;
    x = x_new;

    if (x.lpNorm<Eigen::Infinity>() > opts.divergence_bound) {
      status = SolveStatus::Infeasible;
      break;
    }

    if (iters % 20 == 19 || iters == opts.max_iterations - 1) {
      unpack(x, eta, alpha, beta, nu);
      PrimalEval at_x = eval_primal(prob, eta, nu);
      double res = dual_residual(prob, at_x, alpha, beta);
      if (res < best_res) {
        best_res = res;
        best.p = at_x.p;
        best.duals.eta = eta;
        best.duals.lambda = nu;
        best.alpha = alpha;
        best.beta = beta;
      }
      if (res <= opts.tolerance) {
        status = SolveStatus::Optimal;
        break;
      }
    }
  }

  Solution sol = std::move(best);
  if (sol.p.size() == 0) {
    unpack(x, eta, alpha, beta, nu);
    PrimalEval ev = eval_primal(prob, eta, nu);
    sol.p = ev.p;
    sol.duals.eta = eta;
    sol.duals.lambda = nu;
    sol.alpha = alpha;
    sol.beta = beta;
  }
  sol.status = status;
  sol.iterations = iters + 1;
  sol.objective =
      sol.p.dot(prob.z) - 0.5 * prob.gamma * sol.p.squaredNorm();
  return sol;
}

KktReport kkt_residuals(const AssembledProblem& prob, const Solution& sol) {
  KktReport rep;
  const int m = prob.m;
  const std::size_t J = prob.fairness.size();

  Vec nu = sol.alpha.size() == static_cast<Eigen::Index>(J)
               ? Vec(sol.alpha - sol.beta)
               : sol.duals.lambda;
  PrimalEval ev = eval_primal(prob, sol.duals.eta, nu);
  rep.stationarity = (ev.p - sol.p).lpNorm<Eigen::Infinity>();

  Vec col_sum = Vec::Zero(m);
  for (int d = 0; d < prob.M; ++d)
    col_sum += sol.p.segment(static_cast<Eigen::Index>(d) * m, m);
  rep.feasibility = (col_sum.array() - 1.0).abs().maxCoeff();
  for (std::size_t j = 0; j < J; ++j) {
    const ConstraintVector& c = prob.fairness[j];
    double val = prob.fairness_value(j, sol.p);
    double up = val - (c.target + c.tolerance);
    double lo = (c.target - c.tolerance) - val;
    rep.feasibility = std::max({rep.feasibility, up, lo});
    if (sol.alpha.size() == static_cast<Eigen::Index>(J)) {
      const auto ji = static_cast<Eigen::Index>(j);
      rep.complementarity =
          std::max(rep.complementarity, std::abs(sol.alpha(ji) * up));
      rep.complementarity =
          std::max(rep.complementarity, std::abs(sol.beta(ji) * lo));
    }
  }
  rep.feasibility = std::max(rep.feasibility, 0.0);
  return rep;
}

Solution solve_source_fair(const AssembledProblem& prob,
                           const std::vector<double>& source_targets,
                           const SolverOptions& opts) {
  const int m = prob.m;
  const std::size_t J = prob.fairness.size();
  const std::size_t K = source_targets.size();
  const Eigen::Index n_dual =
      m + 2 * static_cast<Eigen::Index>(J) + 2 * static_cast<Eigen::Index>(K);

  double lip = static_cast<double>(prob.M);
  for (const ConstraintVector& c : prob.fairness)
    lip += 2.0 * c.f.squaredNorm() * prob.v.squaredNorm();
  lip += 2.0 * static_cast<double>(K) * (prob.z.squaredNorm() + 1.0);
  const double step = prob.gamma / lip;

  Vec x = Vec::Zero(n_dual);
  Vec y = x, x_prev = x;
  double momentum = 1.0;

  auto alpha_at = [&](const Vec& d, std::size_t j) {
    return d(m + 2 * static_cast<Eigen::Index>(j));
  };
  auto beta_at = [&](const Vec& d, std::size_t j) {
    return d(m + 2 * static_cast<Eigen::Index>(j) + 1);
  };
  auto a_at = [&](const Vec& d, std::size_t k) {
    return d(m + 2 * static_cast<Eigen::Index>(J) +
             2 * static_cast<Eigen::Index>(k));
  };
  auto b_at = [&](const Vec& d, std::size_t k) {
    return d(m + 2 * static_cast<Eigen::Index>(J) +
             2 * static_cast<Eigen::Index>(k) + 1);
  };

  // Primal for a dual point: p_d = Pi_T(((-zeta u_d - sum nu_j f_j(d)) v -
  // eta)/gamma) with zeta = sum_k (a_k - b_k); t_k = (a_k + b_k - 1)/gamma.
  auto eval = [&](const Vec& d, Vec& p, Vec& col_sum, Vec& fair_val,
                  double& zp, Vec& t) {
    Vec eta = d.head(m);
    double zeta = 0.0;
    for (std::size_t k = 0; k < K; ++k) zeta += a_at(d, k) - b_at(d, k);
    Vec w = -zeta * prob.u;
    for (std::size_t j = 0; j < J; ++j)
      w -= (alpha_at(d, j) - beta_at(d, j)) * prob.fairness[j].f;
    p.resize(prob.z.size());
    col_sum = Vec::Zero(m);
    fair_val = Vec::Zero(static_cast<Eigen::Index>(J));
    zp = 0.0;
    for (int dd = 0; dd < prob.M; ++dd) {
      Vec pd = project_simplex((w(dd) * prob.v - eta) / prob.gamma);
      p.segment(static_cast<Eigen::Index>(dd) * m, m) = pd;
      col_sum += pd;
      double exposure = pd.dot(prob.v);
      zp += prob.u(dd) * exposure;
      for (std::size_t j = 0; j < J; ++j)
        fair_val(static_cast<Eigen::Index>(j)) +=
            prob.fairness[j].f(dd) * exposure;
    }
    t.resize(static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k < K; ++k)
      t(static_cast<Eigen::Index>(k)) =
          (a_at(d, k) + b_at(d, k) - 1.0) / prob.gamma;
  };

  auto residual = [&](const Vec& d, const Vec& col_sum, const Vec& fair_val,
                      double zp, const Vec& t) {
    double r = (col_sum.array() - 1.0).abs().maxCoeff();
    for (std::size_t j = 0; j < J; ++j) {
      const ConstraintVector& c = prob.fairness[j];
      double val = fair_val(static_cast<Eigen::Index>(j));
      double up = val - (c.target + c.tolerance);
      double lo = (c.target - c.tolerance) - val;
      r = std::max(r, alpha_at(d, j) > 0.0 ? std::abs(up) : std::max(0.0, up));
      r = std::max(r, beta_at(d, j) > 0.0 ? std::abs(lo) : std::max(0.0, lo));
    }
    for (std::size_t k = 0; k < K; ++k) {
      double gap = zp - source_targets[k];
      double up = gap - t(static_cast<Eigen::Index>(k));
      double lo = -gap - t(static_cast<Eigen::Index>(k));
      r = std::max(r, a_at(d, k) > 0.0 ? std::abs(up) : std::max(0.0, up));
      r = std::max(r, b_at(d, k) > 0.0 ? std::abs(lo) : std::max(0.0, lo));
    }
    return r;
  };

  Solution best;
  double best_res = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::IterLimit;
  int iters = 0;

  Vec p, col_sum, fair_val, t, grad(n_dual);
  double zp = 0.0;
  for (iters = 0; iters < opts.max_iterations; ++iters) {
    eval(y, p, col_sum, fair_val, zp, t);

    grad.head(m) = col_sum.array() - 1.0;
    for (std::size_t j = 0; j < J; ++j) {
      const ConstraintVector& c = prob.fairness[j];
      const auto ji = static_cast<Eigen::Index>(j);
      grad(m + 2 * ji) = fair_val(ji) - (c.target + c.tolerance);
      grad(m + 2 * ji + 1) = (c.target - c.tolerance) - fair_val(ji);
    }
    for (std::size_t k = 0; k < K; ++k) {
      double gap = zp - source_targets[k];
      const auto base = m + 2 * static_cast<Eigen::Index>(J) +
                        2 * static_cast<Eigen::Index>(k);
      grad(base) = gap - t(static_cast<Eigen::Index>(k));
      grad(base + 1) = -gap - t(static_cast<Eigen::Index>(k));
    }

    Vec x_new = y + step * grad;
    for (Eigen::Index i = m; i < n_dual; ++i)
      x_new(i) = std::max(0.0, x_new(i));

    if (grad.dot(x_new - x_prev) < 0.0) {
      momentum = 1.0;
      y = x_new;
    } else {
      double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = x_new + ((momentum - 1.0) / next) * (x_new - x_prev);
      for (Eigen::Index i = m; i < n_dual; ++i) y(i) = std::max(0.0, y(i));
      momentum = next;
    }
    x_prev = x;
    x = x_new;

    if (x.lpNorm<Eigen::Infinity>() > opts.divergence_bound) {
      status = SolveStatus::Infeasible;
      break;
    }

    if (iters % 20 == 19 || iters == opts.max_iterations - 1) {
      eval(x, p, col_sum, fair_val, zp, t);
      double res = residual(x, col_sum, fair_val, zp, t);
      if (res < best_res) {
        best_res = res;
        best.p = p;
        best.duals.eta = x.head(m);
        best.duals.lambda.resize(static_cast<Eigen::Index>(J));
        best.alpha.resize(static_cast<Eigen::Index>(J));
        best.beta.resize(static_cast<Eigen::Index>(J));
        for (std::size_t j = 0; j < J; ++j) {
          const auto ji = static_cast<Eigen::Index>(j);
          best.alpha(ji) = alpha_at(x, j);
          best.beta(ji) = beta_at(x, j);
          best.duals.lambda(ji) = best.alpha(ji) - best.beta(ji);
        }
      }
      if (res <= opts.tolerance) {
        status = SolveStatus::Optimal;
        break;
      }
    }
  }

  Solution sol = std::move(best);
  if (sol.p.size() == 0) {
    eval(x, p, col_sum, fair_val, zp, t);
    sol.p = p;
    sol.duals.eta = x.head(m);
  }
  sol.status = status;
  sol.iterations = iters + 1;
  double gap_sum = 0.0;
  double served = sol.p.dot(prob.z);
  for (double c : source_targets) gap_sum += std::abs(served - c);
  sol.objective = gap_sum;
  return sol;
}

std::string dump_solution(const AssembledProblem& prob, const Solution& sol) {
  std::ostringstream os;
  os.precision(12);
  os << "M " << prob.M << " m " << prob.m << " gamma " << prob.gamma << "\n";
  os << "status "
     << (sol.status == SolveStatus::Optimal
             ? "optimal"
             : sol.status == SolveStatus::Infeasible ? "infeasible"
                                                     : "iter-limit")
     << " iterations " << sol.iterations << "\n";
  os << "objective " << sol.objective << "\n";
  os << "eta";
  for (Eigen::Index i = 0; i < sol.duals.eta.size(); ++i)
    os << ' ' << sol.duals.eta(i);
  os << "\nlambda";
  for (Eigen::Index i = 0; i < sol.duals.lambda.size(); ++i)
    os << ' ' << sol.duals.lambda(i);
  os << "\np";
  for (Eigen::Index i = 0; i < sol.p.size(); ++i) os << ' ' << sol.p(i);
  os << "\n";
  return os.str();
}

}  // namespace fairrank
