#include "fairrank/ledger.hpp"

#include <cmath>
#include <map>
#include <ostream>

namespace fairrank {

UtilityLedger::UtilityLedger(double rho) : rho_(rho) {
  if (rho <= 0.0 || rho > 1.0)
    throw DomainError("discount rho must lie in (0, 1]");
}

double UtilityLedger::discounted(const Entry& e, std::int64_t now) const {
  return e.value * std::pow(rho_, static_cast<double>(now - e.last_update));
}

void UtilityLedger::update_dest_utility(MemberId d, double increment,
                                        std::int64_t now) {
  Entry& e = dest_[d];
  if (dest_touched_.count(d) && now < e.last_update)
    throw DomainError("destination update time regressed");
  e.value = increment + discounted(e, now);
  e.last_update = now;
  dest_touched_.insert(d);
}

double UtilityLedger::dest_utility(MemberId d, std::int64_t now) const {
  auto it = dest_.find(d);
  return it == dest_.end() ? 0.0 : discounted(it->second, now);
}

double UtilityLedger::group_mean_dest(const std::vector<MemberId>& group,
                                      std::int64_t now) const {
  if (group.empty()) throw DomainError("group mean over an empty group");
  double total = 0.0;
  for (MemberId d : group) total += dest_utility(d, now);
  return total / static_cast<double>(group.size());
}

void UtilityLedger::update_source_utility(int group, double session_value,
                                          std::int64_t now) {
  Entry& e = source_[group];
  if (source_touched_.count(group) && now < e.last_update)
    throw DomainError("source update time regressed");
  e.value = session_value + discounted(e, now);
  e.last_update = now;
  source_touched_.insert(group);
}

double UtilityLedger::source_utility(int group, std::int64_t now) const {
  auto it = source_.find(group);
  return it == source_.end() ? 0.0 : discounted(it->second, now);
}

void UtilityLedger::dump_csv(std::ostream& os) const {
  os << "kind,key,value,last_update\n";
  std::map<MemberId, Entry> dest_sorted(dest_.begin(), dest_.end());
  for (const auto& [d, e] : dest_sorted)
    os << "dest," << d << ',' << e.value << ',' << e.last_update << '\n';
  std::map<int, Entry> source_sorted(source_.begin(), source_.end());
  for (const auto& [g, e] : source_sorted)
    os << "source," << g << ',' << e.value << ',' << e.last_update << '\n';
}

}  // namespace fairrank
