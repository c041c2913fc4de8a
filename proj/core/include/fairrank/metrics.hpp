#pragma once

#include <iosfwd>
#include <string>

#include "fairrank/sim.hpp"

namespace fairrank {

/// The ten simulation metrics. Undefined entries (a group never appearing)
/// are NaN, never silently zero.
struct MetricRow {
  double delta_dp = 0.0;
  double delta_abs_dp = 0.0;
  double ave_su_g0 = 0.0;
  double ave_su_g1 = 0.0;
  double ratio_ave_su_g0g1 = 0.0;
  double pct_tot_su_g0 = 0.0;
  double ave_du_g0 = 0.0;
  double ave_du_g1 = 0.0;
  double ratio_ave_du_g0g1 = 0.0;
  double pct_tot_du_g0 = 0.0;
  int dp_sessions_skipped = 0;  // sessions with a group absent from the pool

  std::array<double, 10> values() const {
    return {delta_dp,  delta_abs_dp, ave_su_g0, ave_su_g1,
            ratio_ave_su_g0g1, pct_tot_su_g0, ave_du_g0, ave_du_g1,
            ratio_ave_du_g0g1, pct_tot_du_g0};
  }
  static const std::array<const char*, 10>& names();
};

MetricRow compute_metrics(const std::vector<SessionRecord>& log);

struct BootstrapSummary {
  MetricRow mean;
  MetricRow half_width;  // 1.96 * sd / sqrt(R)
  int replicates = 0;
};

/// R replicates with seeds derived from (config.seed, 1..R); per-metric
/// mean and normal-approximation 95% half-width, reduced in replicate order.
BootstrapSummary bootstrap(const SimConfig& config, int replicates);

std::uint64_t replicate_seed(std::uint64_t base, int replicate);

struct LabeledRow {
  std::string scenario;
  std::string method;
  int m_slots = 0;
  int refresh = 0;
  std::uint64_t seed = 0;
  MetricRow metrics;
};

/// CSV: settings columns then the ten metrics in table order.
void emit_tables(const std::vector<LabeledRow>& rows, std::ostream& os);

/// Plain-text comparison table (method rows, the four headline columns).
void emit_comparison(const std::vector<LabeledRow>& rows, std::ostream& os);

}  // namespace fairrank
