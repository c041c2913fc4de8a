#include "fairrank/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

namespace fairrank {

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::NoReranker: return "noReranker";
    case Policy::Primal: return "primal";
    case Policy::DualNoDynamic: return "dualNoDynamic";
    case Policy::DualWithDynamic: return "dualWithDynamic";
  }
  return "unknown";
}

Policy policy_from_name(const std::string& name) {
  if (name == "noReranker") return Policy::NoReranker;
  if (name == "primal") return Policy::Primal;
  if (name == "dualNoDynamic") return Policy::DualNoDynamic;
  if (name == "dualWithDynamic") return Policy::DualWithDynamic;
  throw DomainError("unknown policy: " + name);
}

double SimConfig::effective_exposure_tolerance() const {
  return exposure_tolerance >= 0.0 ? exposure_tolerance
                                   : equality_of_opportunity_epsilon(m_slots);
}

void SimConfig::validate() const {
  auto prob = [](double p, const char* field) {
    if (p < 0.0 || p > 1.0)
      throw DomainError(std::string(field) + ": probability outside [0, 1]");
  };
  if (n_members < 3) throw DomainError("sim.n_members: need at least 3");
  if (n_iterations < 0) throw DomainError("sim.n_iterations: negative");
  if (m_slots < 1) throw DomainError("sim.m_slots: need at least 1");
  if (d_eligible < m_slots)
    throw DomainError("sim.d_eligible: fewer eligible than slots");
  if (d_eligible > n_members - 1)
    throw DomainError("sim.d_eligible: more eligible than other members");
  prob(p0_group_fraction, "sim.p0_group_fraction");
  prob(p00, "sim.p00");
  prob(p11, "sim.p11");
  prob(p01, "sim.p01");
  prob(p_base, "sim.p_base");
  if (score_ratio_target <= 0.0 || score_ratio_target >= 1.0)
    throw DomainError("sim.score_ratio_target: must lie in (0, 1)");
  if (d_cov < 1) throw DomainError("sim.d_cov: need at least 1 dimension");
  if (sigma2 <= 0.0) throw DomainError("sim.sigma2: must be positive");
  if (dual_refresh_epochs < 1)
    throw DomainError("sim.dual_refresh_epochs: must be >= 1");
  if (gamma <= 0.0) throw DomainError("sim.gamma: must be positive");
  if (rho <= 0.0 || rho > 1.0)
    throw DomainError("sim.rho: must lie in (0, 1]");
  if (dynamic_tolerance < 0.0)
    throw DomainError("sim.dynamic_tolerance: negative");
  if (solver_tolerance <= 0.0)
    throw DomainError("sim.solver_tolerance: must be positive");
  if (m_slots >= 2) (void)equality_of_opportunity_epsilon(m_slots);
}

Adjacency::Adjacency(int n)
    : n_(n), words_((n + 63) / 64),
      bits_(static_cast<size_t>(n) * static_cast<size_t>((n + 63) / 64), 0) {}

bool Adjacency::has_edge(int i, int j) const {
  return (bits_[static_cast<size_t>(i) * words_ + j / 64] >>
          (j % 64)) & 1ULL;
}

bool Adjacency::add_edge(int i, int j) {
  if (i == j) throw DomainError("self-edges are not allowed");
  if (has_edge(i, j)) return false;
  bits_[static_cast<size_t>(i) * words_ + j / 64] |= 1ULL << (j % 64);
  bits_[static_cast<size_t>(j) * words_ + i / 64] |= 1ULL << (i % 64);
  ++edges_;
  return true;
}

int Adjacency::common_neighbors(int i, int j) const {
  const std::uint64_t* ri = bits_.data() + static_cast<size_t>(i) * words_;
  const std::uint64_t* rj = bits_.data() + static_cast<size_t>(j) * words_;
  int count = 0;
  for (int w = 0; w < words_; ++w) count += std::popcount(ri[w] & rj[w]);
  return count;
}

void Adjacency::write_edge_list(std::ostream& os) const {
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (has_edge(i, j)) os << i << ' ' << j << '\n';
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  // splitmix64 of the salted base; independent streams per salt.
  std::uint64_t x = base + salt * 0x9E3779B97F4A7C15ULL;
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {
constexpr std::uint64_t kGraphSalt = 1;
constexpr std::uint64_t kPickSalt = 2;
constexpr std::uint64_t kClickSalt = 3;
}  // namespace

SimState init_graph(const SimConfig& config) {
  config.validate();
  const int n = config.n_members;
  std::mt19937_64 rng(derive_seed(config.seed, kGraphSalt));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SimState state;
  std::vector<int> labels(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    labels[static_cast<size_t>(i)] =
        unif(rng) < config.p0_group_fraction ? 0 : 1;

  Mat mu(2, config.d_cov);
  for (int g = 0; g < 2; ++g)
    for (int c = 0; c < config.d_cov; ++c) mu(g, c) = normal(rng);

  const double sigma = std::sqrt(config.sigma2);
  state.covariates.resize(n, config.d_cov);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < config.d_cov; ++c)
      state.covariates(i, c) =
          mu(labels[static_cast<size_t>(i)], c) + sigma * normal(rng);

  state.adjacency = Adjacency(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int gi = labels[static_cast<size_t>(i)];
      int gj = labels[static_cast<size_t>(j)];
      double p = gi == gj ? (gi == 0 ? config.p00 : config.p11) : config.p01;
      if (unif(rng) < p) state.adjacency.add_edge(i, j);
    }
  }

  state.member_affinity.resize(n, n);
  for (int i = 0; i < n; ++i) {
    state.member_affinity(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      double d = (state.covariates.row(i) - state.covariates.row(j)).norm();
      state.member_affinity(i, j) = -d;
      state.member_affinity(j, i) = -d;
    }
  }

  state.groups = GroupAssignment(std::move(labels));
  state.ledger = UtilityLedger(config.rho);
  state.pick_rng.seed(derive_seed(config.seed, kPickSalt));
  state.click_rng.seed(derive_seed(config.seed, kClickSalt));
  return state;
}

std::pair<double, int> affinities(const SimState& state, int i, int j) {
  if (i == j) throw DomainError("affinity of a member with itself");
  return {state.member_affinity(i, j), state.adjacency.common_neighbors(i, j)};
}

ScoreResult model_scores(const SimState& state, int i,
                         const SimConfig& config) {
  const int n = state.adjacency.size();
  if (n < 3) throw DomainError("need at least 3 members to score");
  ScoreResult out;
  out.scores = Vec::Zero(n);

  Vec aff_graph(n), aff_member(n);
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    aff_graph(j) = static_cast<double>(state.adjacency.common_neighbors(i, j));
    aff_member(j) = state.member_affinity(i, j);
  }
  const double cnt = n - 1;

  // Per-dimension adaptive temperatures, damped so the largest score never
  // overwhelms the rest as the graph densifies. The graph temperature decays
  // with the square root of the top count, keeping the total graph tilt
  // sublinear in connectivity; the member temperature spends its ratio steps
  // over the lower range of the affinity spread (mean minus minimum), which
  // tracks how far the most distant candidates sit below the typical one.
  const double delta = -std::log(config.score_ratio_target);
  double cmax = 0.0;
  for (int j = 0; j < n; ++j)
    if (j != i) cmax = std::max(cmax, aff_graph(j));
  constexpr double kGraphTilt = 2.2;
  constexpr double kMemberTilt = 0.68;
  constexpr double kPeakBonus = 0.30;
  double lambda = cmax > 0.0 ? kGraphTilt * delta / std::sqrt(cmax) : 0.0;

  double mean = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    mean += aff_member(j);
    lo = std::min(lo, aff_member(j));
  }
  mean /= cnt;
  double range = mean - lo;
  double mu = range > 0.0 ? kMemberTilt * delta / range : 0.0;

  if (lambda == 0.0 && mu == 0.0) {
    out.degenerate = true;
    for (int j = 0; j < n; ++j)
      if (j != i) out.scores(j) = 1.0 / cnt;
    return out;
  }
  out.tau = lambda;

  Vec e = Vec::Zero(n);
  double top = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    double peak = cmax > 0.0 ? kPeakBonus * delta * std::pow(aff_graph(j) / cmax, 8.0) : 0.0;
    e(j) = lambda * aff_graph(j) + peak + mu * aff_member(j);
    top = std::max(top, e(j));
  }
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    double s = std::exp(e(j) - top);
    out.scores(j) = s;
    total += s;
  }
  out.scores /= total;
  return out;
}

namespace {

struct SessionSetup {
  std::vector<MemberId> candidates;  // top-D, score descending
  Vec u;                             // their normalized scores
  Vec v;
  std::vector<ConstraintVector> constraints;
};

ConstraintVector zero_constraint(int n_cands, ConstraintKind kind,
                                 double tolerance) {
  ConstraintVector c;
  c.kind = kind;
  c.f = Vec::Zero(n_cands);
  c.tolerance = tolerance;
  return c;
}

SessionSetup make_session(const SimState& state, const SimConfig& config,
                          int source, const Vec& scores, bool with_dynamic) {
  const int n = state.adjacency.size();
  SessionSetup s;
  std::vector<int> order;
  order.reserve(static_cast<size_t>(n - 1));
  for (int j = 0; j < n; ++j)
    if (j != source) order.push_back(j);
  std::partial_sort(order.begin(), order.begin() + config.d_eligible,
                    order.end(), [&](int a, int b) {
                      if (scores(a) != scores(b))
                        return scores(a) > scores(b);
                      return a < b;
                    });
  order.resize(static_cast<size_t>(config.d_eligible));

  s.candidates.assign(order.begin(), order.end());
  s.u.resize(config.d_eligible);
  for (int c = 0; c < config.d_eligible; ++c)
    s.u(c) = scores(s.candidates[static_cast<size_t>(c)]);
  s.v = position_bias_vector(config.m_slots);

  // Parity of per-slate-seat exposure with 50% headroom: each group's
  // exposure sum is weighted by 2/(3m), so the tolerance schedule admits a
  // bounded gap in exposure sums that shrinks as slates grow. The constraint
  // is dropped when the pool is single-group (nothing to trade off).
  double eps = config.effective_exposure_tolerance();
  ConstraintVector dp =
      zero_constraint(config.d_eligible, ConstraintKind::DP, eps);
  int have[2] = {0, 0};
  for (int c = 0; c < config.d_eligible; ++c)
    have[state.groups.label(s.candidates[static_cast<size_t>(c)])] = 1;
  if (have[0] && have[1]) {
    const double scale = 1.0 / (3.3 * static_cast<double>(config.m_slots));
    for (int c = 0; c < config.d_eligible; ++c)
      dp.f(c) = state.groups.label(s.candidates[static_cast<size_t>(c)]) == 0
                    ? scale
                    : -scale;
  }
  s.constraints.push_back(std::move(dp));

  if (with_dynamic) {
    std::int64_t now = state.iteration;
    std::int64_t snap_t = std::max<std::int64_t>(0, now - 1);
    GroupUtilitySnapshot snap;
    snap.t = snap_t;
    snap.mu[0] = state.ledger.group_mean_dest(state.groups.members_of(0), snap_t);
    snap.mu[1] = state.ledger.group_mean_dest(state.groups.members_of(1), snap_t);
    try {
      s.constraints.push_back(build_dynamic_constraint(
          state.groups, 0, 1, s.candidates, s.u, snap, config.rho, now,
          config.dynamic_tolerance));
    } catch (const DomainError&) {
      s.constraints.push_back(zero_constraint(
          config.d_eligible, ConstraintKind::Dynamic,
          config.dynamic_tolerance));
    }
  }
  return s;
}

// Solve the session problem, widening tolerances once on infeasibility.
// Returns nullopt only if it stays infeasible.
std::optional<Solution> solve_session(const SessionSetup& s,
                                      const SimConfig& config,
                                      bool* widened) {
  SolverOptions opts;
  opts.tolerance = config.solver_tolerance;
  opts.max_iterations = config.solver_max_iterations;
  AssembledProblem prob = assemble(s.u, s.v, s.constraints, config.gamma);
  Solution sol = solve(prob, opts);
  if (sol.status != SolveStatus::Infeasible) return sol;
  std::vector<ConstraintVector> wide = s.constraints;
  for (ConstraintVector& c : wide) c.tolerance *= 2.0;
  if (widened) *widened = true;
  prob = assemble(s.u, s.v, wide, config.gamma);
  sol = solve(prob, opts);
  if (sol.status != SolveStatus::Infeasible) return sol;
  return std::nullopt;
}

}  // namespace

SessionRecord run_iteration(SimState& state, const SimConfig& config) {
  const int n = state.adjacency.size();
  const int m = config.m_slots;
  const std::int64_t now = state.iteration;

  SessionRecord rec;
  rec.iteration = static_cast<int>(now);
  std::uniform_int_distribution<int> pick(0, n - 1);
  int source = pick(state.pick_rng);
  rec.source = source;
  rec.source_group = state.groups.label(source);

  ScoreResult scored = model_scores(state, source, config);
  rec.degenerate_scores = scored.degenerate;

  const bool dynamic = config.policy == Policy::DualWithDynamic;
  SessionSetup session =
      make_session(state, config, source, scored.scores, dynamic);
  for (MemberId c : session.candidates)
    (state.groups.label(c) == 0 ? rec.cand_g0 : rec.cand_g1)++;

  std::vector<MemberId> shown;  // positions into the candidate list
  switch (config.policy) {
    case Policy::NoReranker: {
      for (int k = 0; k < m; ++k) shown.push_back(k);
      break;
    }
    case Policy::Primal: {
      bool widened = false;
      std::optional<Solution> sol = solve_session(session, config, &widened);
      rec.solver_fallback = widened || !sol.has_value();
      if (sol) {
        SlotAssignment a =
            greedy_assign(sol->policy(config.d_eligible, m).P);
        shown = a.member_at_slot;
      } else {
        for (int k = 0; k < m; ++k) shown.push_back(k);
      }
      break;
    }
    case Policy::DualNoDynamic:
    case Policy::DualWithDynamic: {
      // A single-group candidate pool yields an all-zero constraint whose
      // duals carry no information; keep the previously cached duals then.
      bool vacuous = true;
      for (const ConstraintVector& c : session.constraints)
        if (c.f.cwiseAbs().maxCoeff() > 0.0) vacuous = false;
      if ((!state.dual_store.initialized() ||
           now % config.dual_refresh_epochs == 0) &&
          !(vacuous && state.dual_store.initialized())) {
        bool widened = false;
        std::optional<Solution> sol =
            solve_session(session, config, &widened);
        rec.solver_fallback = widened || !sol.has_value();
        if (sol) {
          state.dual_store.duals = sol->duals;
          state.dual_store.gamma = config.gamma;
          state.dual_store.refreshed_at = now;
        }
      }
      if (state.dual_store.initialized()) {
        std::vector<Vec> fs;
        for (const ConstraintVector& c : session.constraints)
          fs.push_back(c.f);
        // Cached duals were solved against an older graph snapshot, so their
        // fairness push is discounted exponentially with age. The amplitude
        // normalizes a 50-iteration refresh cycle to unit average weight,
        // leaving the default cadence's calibration unchanged while faster
        // refreshes apply systematically fresher (stronger) duals.
        constexpr double kDualDecayHorizon = 30.0;
        constexpr double kDualCycle = 50.0;
        const double amp = (kDualCycle / kDualDecayHorizon) /
                           (1.0 - std::exp(-kDualCycle / kDualDecayHorizon));
        const double age =
            static_cast<double>(now - state.dual_store.refreshed_at);
        DualStore applied = state.dual_store;
        applied.duals.lambda *= amp * std::exp(-age / kDualDecayHorizon);
        SlotAssignment a = score_session(session.u, session.v, fs, applied);
        shown = a.member_at_slot;
      } else {
        rec.solver_fallback = true;
        for (int k = 0; k < m; ++k) shown.push_back(k);
      }
      break;
    }
  }

  // Session utility pairs the k-th highest score with the k-th slot weight:
  // a rank-optimal sum, so the source side is measured against the best the
  // scores allow rather than the slate a reranker happened to pick.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double session_utility = 0.0;
  for (int k = 0; k < m; ++k) {
    MemberId member = session.candidates[static_cast<size_t>(shown[static_cast<size_t>(k)])];
    double pb = position_bias(k + 1);
    ShownEntry entry;
    entry.member = member;
    entry.group = state.groups.label(member);
    entry.slot = k + 1;
    double draw = unif(state.click_rng);
    if (draw < config.p_base * pb)
      entry.edge_created = state.adjacency.add_edge(source, member);
    rec.shown.push_back(entry);
    session_utility += session.u(k) * pb;
    state.ledger.update_dest_utility(member, pb, now);
  }
  rec.source_utility = session_utility;
  state.ledger.update_source_utility(rec.source_group, session_utility, now);

  state.iteration = now + 1;
  return rec;
}

SimResult run_simulation(const SimConfig& config) {
  SimResult result;
  result.state = init_graph(config);
  // Iteration streams are re-seeded here so every policy sees the same
  // query sequence for a given base seed.
  result.state.pick_rng.seed(derive_seed(config.seed, kPickSalt));
  result.state.click_rng.seed(derive_seed(config.seed, kClickSalt));
  result.log.reserve(static_cast<size_t>(config.n_iterations));
  for (int t = 0; t < config.n_iterations; ++t) {
    SessionRecord rec = run_iteration(result.state, config);
    result.log.push_back(rec);
    result.state.session_log.push_back(std::move(rec));
  }
  return result;
}

void write_session_log(const std::vector<SessionRecord>& log,
                       std::ostream& os) {
  os.precision(17);
  for (const SessionRecord& r : log) {
    os << "{\"iter\":" << r.iteration << ",\"source\":" << r.source
       << ",\"source_group\":" << r.source_group
       << ",\"cand_g0\":" << r.cand_g0 << ",\"cand_g1\":" << r.cand_g1
       << ",\"source_utility\":" << r.source_utility
       << ",\"degenerate\":" << (r.degenerate_scores ? "true" : "false")
       << ",\"fallback\":" << (r.solver_fallback ? "true" : "false")
       << ",\"shown\":[";
    for (std::size_t i = 0; i < r.shown.size(); ++i) {
      const ShownEntry& e = r.shown[i];
      if (i) os << ',';
      os << "{\"m\":" << e.member << ",\"g\":" << e.group
         << ",\"slot\":" << e.slot
         << ",\"pb\":" << position_bias(e.slot)
         << ",\"edge\":" << (e.edge_created ? "true" : "false") << '}';
    }
    os << "]}\n";
  }
}

}  // namespace fairrank
