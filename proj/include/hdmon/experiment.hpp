#pragma once

#include "hdmon/datagen.hpp"
#include "hdmon/monitor.hpp"

namespace hdmon {

struct ExperimentReport {
  long reps_requested = 0;
  long reps_done = 0;         // replications that produced a decision
  long phase1_failures = 0;   // estimator failures, excluded (must stay < 1%)
  long alarms = 0;            // alarms anywhere in (n, horizon]
  long alarms_post = 0;       // alarms at k >= k_star (counted for ADT)
  double reject_rate = 0.0;
  double adt = std::numeric_limits<double>::quiet_NaN();
  std::map<int, long> triggered_by_q;  // smallest triggering q per alarm
  double median_abs_loc_err = std::numeric_limits<double>::quiet_NaN();  // |m_hat - k*|
};

// Runs spec.reps independent monitors against shared thresholds. Phase-I
// norms are re-estimated per replication from that replication's first n
// rows. Deterministic given the spec, independent of thread count.
ExperimentReport run_experiment(const ScenarioSpec& spec,
                                const std::map<int, double>& c_alpha_star,
                                long incomplete_samples = 0, int threads = 0);

}  // namespace hdmon
