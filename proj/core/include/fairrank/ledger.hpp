#pragma once

#include <iosfwd>
#include <unordered_map>
#include <unordered_set>

#include "fairrank/model.hpp"

namespace fairrank {

/// Discounted cumulative utilities: per-member destination side and
/// per-group source side. Values are stored at their last update time and
/// discounted lazily on read.
class UtilityLedger {
 public:
  explicit UtilityLedger(double rho = 1.0);

  double rho() const { return rho_; }

  /// Eq-style recursion U(d)[T] = increment + rho^(T - t) U(d)[t].
  void update_dest_utility(MemberId d, double increment, std::int64_t now);

  /// Member value discounted to `now`; 0 for members never shown.
  double dest_utility(MemberId d, std::int64_t now) const;

  /// (1/|G|) sum over the group of values discounted to `now`.
  double group_mean_dest(const std::vector<MemberId>& group,
                         std::int64_t now) const;

  /// Group accumulator recursion acc[T] = session_value + rho^(T-t) acc[t].
  void update_source_utility(int group, double session_value,
                             std::int64_t now);
  double source_utility(int group, std::int64_t now) const;

  const std::unordered_set<MemberId>& dest_touched() const {
    return dest_touched_;
  }
  const std::unordered_set<int>& source_touched() const {
    return source_touched_;
  }

  /// CSV: kind,key,value,last_update (dest rows then source rows).
  void dump_csv(std::ostream& os) const;

 private:
  struct Entry {
    double value = 0.0;
    std::int64_t last_update = 0;
  };
  double discounted(const Entry& e, std::int64_t now) const;

  double rho_;
  std::unordered_map<MemberId, Entry> dest_;
  std::unordered_map<int, Entry> source_;
  std::unordered_set<MemberId> dest_touched_;
  std::unordered_set<int> source_touched_;
};

}  // namespace fairrank
