#pragma once

#include <optional>

#include "hdmon/cusum.hpp"
#include "hdmon/lqstat.hpp"
#include "hdmon/signorm.hpp"

namespace hdmon {

// Per-test size for a combined monitor over |I| orders.
inline double adjusted_alpha(double alpha, int card) {
  require(alpha > 0.0 && alpha < 1.0, "adjusted_alpha: alpha outside (0,1)");
  require(card >= 1, "adjusted_alpha: |I| must be >= 1");
  return 1.0 - std::pow(1.0 - alpha, 1.0 / static_cast<double>(card));
}

struct AlarmEvent {
  long k_alarm = 0;
  std::vector<int> triggered_q;     // every q whose statistic exceeded its threshold
  std::map<int, double> stats;      // all active q -> T_{n,q}(k_alarm)
  int trigger_q = 0;                // smallest triggering q
  long m_hat = 0;                   // argmax m of the triggering statistic
};

enum class StepDecision { Continue, Alarm };

// Online decision layer: per-q statistics against c_{alpha*} w(k/n - 1),
// union rejection at the first exceedance, then terminal.
class Monitor {
 public:
  Monitor(MonitorConfig cfg, NormEstimates norms, std::map<int, double> c_alpha_star,
          const std::vector<Vec>& phase1_rows);

  StepDecision step(const Observation& obs);

  bool alarmed() const { return alarm_.has_value(); }
  bool finished() const { return alarmed() || t_now() >= cfg_.horizon(); }
  long t_now() const { return cusum_.t_now(); }
  const MonitorConfig& config() const { return cfg_; }
  const AlarmEvent& alarm() const;
  long locate_change(int q) const;

  struct KRecord {
    long k = 0;
    std::map<int, double> stats;       // active q -> statistic
    std::map<int, double> thresholds;  // active q -> c w(k/n-1)
  };
  const KRecord& last() const { return last_; }

  std::uint64_t scan_ops(int q) const;  // multiply-add counter per lane

 private:
  MonitorConfig cfg_;
  NormEstimates norms_;
  std::map<int, double> c_;
  double sigma_f_ = 0.0;
  CusumState cusum_;
  std::map<int, ProductSumTables> tables_;  // q >= 4 lanes
  std::optional<AlarmEvent> alarm_;
  KRecord last_;
  std::map<int, std::uint64_t> ops_;
  Vec center_;  // phase-I mean subtracted from every observation
};

}  // namespace hdmon
