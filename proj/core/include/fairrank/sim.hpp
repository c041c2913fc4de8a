#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>

#include "fairrank/constraints.hpp"
#include "fairrank/ledger.hpp"
#include "fairrank/lp.hpp"
#include "fairrank/scorer.hpp"

namespace fairrank {

enum class Policy { NoReranker, Primal, DualNoDynamic, DualWithDynamic };

const char* policy_name(Policy p);
Policy policy_from_name(const std::string& name);

struct SimConfig {
  int n_members = 1000;
  int n_iterations = 1000;
  int m_slots = 10;
  int d_eligible = 250;
  double p0_group_fraction = 0.65;
  int d_cov = 30;
  double sigma2 = 0.1;
  double p00 = 0.05;
  double p11 = 0.04;
  double p01 = 0.01;
  double p_base = 0.1;
  double score_ratio_target = 0.9;
  Policy policy = Policy::NoReranker;
  int dual_refresh_epochs = 50;
  double gamma = 0.01;
  double rho = 1.0;
  double dynamic_tolerance = 0.1;
  double exposure_tolerance = -1.0;  // < 0: use equality_of_opportunity_epsilon
  double solver_tolerance = 1e-8;
  int solver_max_iterations = 100000;
  std::uint64_t seed = 1;

  double effective_exposure_tolerance() const;
  void validate() const;  // throws DomainError with a field path
};

/// Symmetric 0/1 adjacency with zero diagonal, stored as bit rows.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(int n);

  int size() const { return n_; }
  bool has_edge(int i, int j) const;
  /// Inserts both directions; returns false if the edge already existed.
  bool add_edge(int i, int j);
  /// (A^2)_{ij}: the number of common neighbors.
  int common_neighbors(int i, int j) const;
  std::int64_t edge_count() const { return edges_; }
  void write_edge_list(std::ostream& os) const;

 private:
  int n_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::int64_t edges_ = 0;
};

struct ShownEntry {
  MemberId member = 0;
  int group = 0;
  int slot = 0;  // 1-based
  bool edge_created = false;
};

struct SessionRecord {
  int iteration = 0;
  MemberId source = 0;
  int source_group = 0;
  int cand_g0 = 0;  // group counts within the session's candidate set
  int cand_g1 = 0;
  double source_utility = 0.0;
  bool degenerate_scores = false;
  bool solver_fallback = false;
  std::vector<ShownEntry> shown;
};

struct SimState {
  Adjacency adjacency;
  Mat covariates;       // n x d_cov
  Mat member_affinity;  // -||X_i - X_j||, precomputed
  GroupAssignment groups;
  UtilityLedger ledger{1.0};
  DualStore dual_store;
  std::vector<SessionRecord> session_log;
  std::mt19937_64 pick_rng;
  std::mt19937_64 click_rng;
  std::int64_t iteration = 0;
};

/// Stream-separated seeding: one stream for graph generation, one for
/// source picks, one for click draws, all derived from the base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

/// Draw groups, covariates and the stochastic block model edges.
SimState init_graph(const SimConfig& config);

/// (member affinity, graph affinity) = (-||X_i - X_j||, common neighbors).
std::pair<double, int> affinities(const SimState& state, int i, int j);

struct ScoreResult {
  Vec scores;  // length n, entry i zero; positive elsewhere, sums to 1
  double tau = 0.0;
  bool degenerate = false;
};

/// Model scores with the adaptive temperature hitting the top-two ratio.
ScoreResult model_scores(const SimState& state, int i,
                         const SimConfig& config);

SessionRecord run_iteration(SimState& state, const SimConfig& config);

struct SimResult {
  std::vector<SessionRecord> log;
  SimState state;
};

SimResult run_simulation(const SimConfig& config);

/// Line-delimited JSON, one record per iteration. Byte-stable for a seed.
void write_session_log(const std::vector<SessionRecord>& log,
                       std::ostream& os);

}  // namespace fairrank
