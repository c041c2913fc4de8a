#include "fairrank/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace fairrank {
namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const std::array<const char*, 10>& MetricRow::names() {
  static const std::array<const char*, 10> kNames = {
      "deltaDP",   "deltaAbsDP", "aveSUG0",  "aveSUG1", "ratioAveSUG0G1",
      "pctTotSUG0", "aveDUG0",    "aveDUG1", "ratioAveDUG0G1",
      "pctTotDUG0"};
  return kNames;
}

MetricRow compute_metrics(const std::vector<SessionRecord>& log) {
  if (log.empty()) throw DomainError("metrics over an empty session log");
  MetricRow row;

  double dp_sum = 0.0, abs_dp_sum = 0.0;
  int dp_sessions = 0;
  std::map<MemberId, double> source_total[2];
  std::map<MemberId, double> dest_total[2];

  for (const SessionRecord& r : log) {
    // Per-session parity gap: mean exposure of the shown members of each
    // group; sessions whose slate misses a group carry no gap and are skipped.
    double exp_g0 = 0.0, exp_g1 = 0.0;
    int shown_g0 = 0, shown_g1 = 0;
    for (const ShownEntry& e : r.shown) {
      (e.group == 0 ? exp_g0 : exp_g1) += position_bias(e.slot);
      (e.group == 0 ? shown_g0 : shown_g1)++;
    }
    if (shown_g0 > 0 && shown_g1 > 0) {
      double diff = exp_g0 / shown_g0 - exp_g1 / shown_g1;
      dp_sum += diff;
      abs_dp_sum += std::abs(diff);
      ++dp_sessions;
    } else {
      ++row.dp_sessions_skipped;
    }
    source_total[r.source_group == 0 ? 0 : 1][r.source] += r.source_utility;
    for (const ShownEntry& e : r.shown)
      dest_total[e.group == 0 ? 0 : 1][e.member] += position_bias(e.slot);
  }

  row.delta_dp = dp_sessions > 0 ? dp_sum / dp_sessions : kNaN;
  row.delta_abs_dp = dp_sessions > 0 ? abs_dp_sum / dp_sessions : kNaN;

  auto mean_of = [](const std::map<MemberId, double>& totals) {
    if (totals.empty()) return kNaN;
    double s = 0.0;
    for (const auto& [id, v] : totals) s += v;
    return s / static_cast<double>(totals.size());
  };
  auto sum_of = [](const std::map<MemberId, double>& totals) {
    double s = 0.0;
    for (const auto& [id, v] : totals) s += v;
    return s;
  };

  row.ave_su_g0 = mean_of(source_total[0]);
  row.ave_su_g1 = mean_of(source_total[1]);
  double su_denom = row.ave_su_g0 + row.ave_su_g1;
  row.ratio_ave_su_g0g1 = su_denom > 0.0 ? row.ave_su_g0 / su_denom : kNaN;
  double su_tot = sum_of(source_total[0]) + sum_of(source_total[1]);
  row.pct_tot_su_g0 = su_tot > 0.0 ? sum_of(source_total[0]) / su_tot : kNaN;

  row.ave_du_g0 = mean_of(dest_total[0]);
  row.ave_du_g1 = mean_of(dest_total[1]);
  double du_denom = row.ave_du_g0 + row.ave_du_g1;
  row.ratio_ave_du_g0g1 = du_denom > 0.0 ? row.ave_du_g0 / du_denom : kNaN;
  double du_tot = sum_of(dest_total[0]) + sum_of(dest_total[1]);
  row.pct_tot_du_g0 = du_tot > 0.0 ? sum_of(dest_total[0]) / du_tot : kNaN;
  return row;
}

std::uint64_t replicate_seed(std::uint64_t base, int replicate) {
  return derive_seed(base, 0x5EED0000ULL + static_cast<std::uint64_t>(replicate));
}

BootstrapSummary bootstrap(const SimConfig& config, int replicates) {
  if (replicates < 2) throw DomainError("bootstrap needs >= 2 replicates");
  std::vector<MetricRow> rows;
  rows.reserve(static_cast<size_t>(replicates));
  for (int r = 1; r <= replicates; ++r) {
    SimConfig c = config;
    c.seed = replicate_seed(config.seed, r);
    rows.push_back(compute_metrics(run_simulation(c).log));
  }

  BootstrapSummary out;
  out.replicates = replicates;
  auto reduce = [&](auto member) {
    double sum = 0.0, sum2 = 0.0;
    for (const MetricRow& r : rows) {
      double v = r.*member;
      sum += v;
      sum2 += v * v;
    }
    double n = static_cast<double>(replicates);
    double mean = sum / n;
    double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    out.mean.*member = mean;
    out.half_width.*member = 1.96 * std::sqrt(var / n);
  };
  reduce(&MetricRow::delta_dp);
  reduce(&MetricRow::delta_abs_dp);
  reduce(&MetricRow::ave_su_g0);
  reduce(&MetricRow::ave_su_g1);
  reduce(&MetricRow::ratio_ave_su_g0g1);
  reduce(&MetricRow::pct_tot_su_g0);
  reduce(&MetricRow::ave_du_g0);
  reduce(&MetricRow::ave_du_g1);
  reduce(&MetricRow::ratio_ave_du_g0g1);
  reduce(&MetricRow::pct_tot_du_g0);
  return out;
}

void emit_tables(const std::vector<LabeledRow>& rows, std::ostream& os) {
  os.precision(17);
  os << "scenario,method,m,refresh,seed";
  for (const char* name : MetricRow::names()) os << ',' << name;
  os << '\n';
  for (const LabeledRow& r : rows) {
    os << r.scenario << ',' << r.method << ',' << r.m_slots << ','
       << r.refresh << ',' << r.seed;
    for (double v : r.metrics.values()) os << ',' << v;
    os << '\n';
  }
}

void emit_comparison(const std::vector<LabeledRow>& rows, std::ostream& os) {
  os.precision(4);
  os << "method            deltaDP  deltaAbsDP  ratioAveSU  pctTotDUG0\n";
  for (const LabeledRow& r : rows) {
    os.width(16);
    os << std::left << r.method << "  ";
    os << std::fixed;
    os << r.metrics.delta_dp << "  " << r.metrics.delta_abs_dp << "      "
       << r.metrics.ratio_ave_su_g0g1 << "      " << r.metrics.pct_tot_du_g0
       << '\n';
    os.unsetf(std::ios_base::floatfield);
  }
}

}  // namespace fairrank
