#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fairrank {

using MemberId = std::int32_t;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : DomainError {
  using DomainError::DomainError;
};

/// Disjoint group structure over a member population. labels[i] is the group
/// of member i; groups() enumerates the members of each group id.
class GroupAssignment {
 public:
  GroupAssignment() = default;
  explicit GroupAssignment(std::vector<int> labels);

  int label(MemberId m) const { return labels_.at(static_cast<size_t>(m)); }
  const std::vector<int>& labels() const { return labels_; }
  int num_groups() const { return num_groups_; }
  const std::vector<MemberId>& members_of(int group) const;
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<int> labels_;
  std::vector<std::vector<MemberId>> groups_;
  int num_groups_ = 0;
};

/// Exposure weight of slot k (1-based): 1 / (1 + ln k).
double position_bias(int k);

/// v = (posBias(1), ..., posBias(m)). Strictly positive and decreasing.
Vec position_bias_vector(int m);

/// M x m matrix of showing probabilities. Columns sum to 1 (every slot is
/// filled), rows sum to at most 1 (a candidate appears at most once).
struct RankingPolicy {
  Mat P;

  int candidates() const { return static_cast<int>(P.rows()); }
  int slots() const { return static_cast<int>(P.cols()); }

  /// Candidate-major vectorization: p segment [d*m, (d+1)*m) is row d.
  Vec vectorized() const;
  static RankingPolicy from_vector(const Vec& p, int M, int m);

  /// Checks 0 <= P <= 1, column sums == 1 and row sums <= 1 within tol.
  bool is_valid(double tol = 1e-8) const;
};

/// Deterministic slot assignment: member_at_slot[r] shown at slot r+1.
struct SlotAssignment {
  std::vector<MemberId> member_at_slot;
};

/// u^T P v, the expected utility the source receives from policy P.
double expected_source_utility(const Vec& u, const RankingPolicy& policy,
                               const Vec& v);

/// u_sd * (P_row . v), the expected exposure utility of one candidate.
double expected_dest_utility(double u_sd, const Vec& p_row, const Vec& v);

}  // namespace fairrank
