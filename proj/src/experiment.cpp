#include "hdmon/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace hdmon {

namespace {

struct RepOutcome {
  bool failed = false;
  bool alarmed = false;
  long k_alarm = 0;
  int trigger_q = 0;
  long m_hat = 0;
};

RepOutcome one_rep(const ScenarioSpec& spec, const std::map<int, double>& c,
                   long incomplete_samples, long rep) {
  RepOutcome out;
  const auto rows = gen_stream(spec, rep);
  const MonitorConfig cfg = spec.monitor_config();
  std::vector<Vec> phase1(rows.begin(), rows.begin() + spec.n);
  NormEstimates norms;
  try {
    norms = estimate_norms(phase1, spec.q_set, incomplete_samples,
                           spec.seed ^ (0x51ed2701ULL + static_cast<std::uint64_t>(rep)));
    for (int q : spec.q_set) {
      const double v = q == 2 ? norms.frob_sq : norms.lq.at(q);
      if (!(v > 0.0)) throw std::runtime_error("nonpositive estimate");
    }
  } catch (const std::exception&) {
    out.failed = true;
    return out;
  }
  Monitor mon(cfg, norms, c, phase1);
  for (long t = spec.n + 1; t <= spec.horizon(); ++t) {
    if (mon.step({t, rows[t - 1]}) == StepDecision::Alarm) {
      out.alarmed = true;
      out.k_alarm = t;
      out.trigger_q = mon.alarm().trigger_q;
      out.m_hat = mon.alarm().m_hat;
      break;
    }
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ScenarioSpec& spec, const std::map<int, double>& c,
                                long incomplete_samples, int threads) {
  spec.validate();
  for (int q : spec.q_set)
    require(c.count(q) == 1, "experiment: missing threshold for q=" + std::to_string(q));

  std::vector<RepOutcome> outcomes(spec.reps);
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, spec.reps)));
  std::atomic<long> next{0};
  auto worker = [&]() {
    while (true) {
      const long r = next.fetch_add(1);
      if (r >= spec.reps) break;
      outcomes[r] = one_rep(spec, c, incomplete_samples, r);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  ExperimentReport rep;
  rep.reps_requested = spec.reps;
  const long ks = spec.change_time();
  std::vector<double> delays;
  std::vector<double> loc_err;
  for (const auto& o : outcomes) {
    if (o.failed) {
      ++rep.phase1_failures;
      continue;
    }
    ++rep.reps_done;
    if (o.alarmed) {
      ++rep.alarms;
      ++rep.triggered_by_q[o.trigger_q];
      if (spec.delta > 0.0 && o.k_alarm >= ks) {
        ++rep.alarms_post;
        delays.push_back(static_cast<double>(o.k_alarm - ks));
        loc_err.push_back(std::abs(static_cast<double>(o.m_hat - ks)));
      }
    }
  }
  require(rep.reps_done > 0, "experiment: all replications failed");
  if (rep.phase1_failures * 100 >= spec.reps)
    throw std::runtime_error("experiment: phase-I failures exceed 1% of replications");
  rep.reject_rate = static_cast<double>(rep.alarms) / static_cast<double>(rep.reps_done);
  if (!delays.empty()) {
    double s = 0.0;
    for (double d : delays) s += d;
    rep.adt = s / static_cast<double>(delays.size());
    std::sort(loc_err.begin(), loc_err.end());
    rep.median_abs_loc_err = loc_err[loc_err.size() / 2];
  }
  return rep;
}

}  // namespace hdmon
