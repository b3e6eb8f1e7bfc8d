#include "hdmon/monitor.hpp"

#include <cmath>

#include "hdmon/l2stat.hpp"

namespace hdmon {

Monitor::Monitor(MonitorConfig cfg, NormEstimates norms, std::map<int, double> c_alpha_star,
                 const std::vector<Vec>& phase1_rows)
    : cfg_(std::move(cfg)),
      norms_(std::move(norms)),
      c_(std::move(c_alpha_star)),
      cusum_(cfg_.p, cfg_.horizon()) {
  cfg_.validate();
  require(static_cast<long>(phase1_rows.size()) == cfg_.n,
          "monitor: phase-I block must hold exactly n rows");
  require(norms_.n_train == cfg_.n, "monitor: estimates trained on a different n");
  for (int q : cfg_.q_set) {
    require(c_.count(q) == 1, "monitor: missing critical value for q=" + std::to_string(q));
    if (q == 2) {
      require(norms_.frob_sq > 0.0,
              "monitor: nonpositive Frobenius estimate; enlarge the training block");
      sigma_f_ = std::sqrt(norms_.frob_sq);
    } else {
      auto it = norms_.lq.find(q);
      require(it != norms_.lq.end(), "monitor: missing norm estimate for q=" + std::to_string(q));
      require(it->second > 0.0,
              "monitor: nonpositive norm estimate for q=" + std::to_string(q) +
                  "; enlarge n or the incomplete sample count");
      tables_.emplace(q, ProductSumTables(q, cfg_.p, cfg_.horizon()));
    }
    ops_[q] = 0;
  }
  // Difference kernels are translation invariant; centering by the phase-I
  // mean keeps the high-order product sums well conditioned.
  center_.assign(cfg_.p, 0.0);
  for (const auto& row : phase1_rows)
    for (int l = 0; l < cfg_.p; ++l) center_[l] += row[l];
  for (int l = 0; l < cfg_.p; ++l) center_[l] /= static_cast<double>(cfg_.n);
  Vec x(cfg_.p);
  for (long t = 1; t <= cfg_.n; ++t) {
    for (int l = 0; l < cfg_.p; ++l) x[l] = phase1_rows[t - 1][l] - center_[l];
    cusum_.push({t, x});
    for (auto& [q, tab] : tables_) tab.extend(x);
  }
}

StepDecision Monitor::step(const Observation& obs) {
  require(!alarmed(), "monitor: already in alarm (terminal)");
  require(t_now() < cfg_.horizon(), "monitor: past closed-end horizon");
  require(obs.t == t_now() + 1, "monitor: non-contiguous time index");
  require(obs.t > cfg_.n, "monitor: stepping inside the phase-I block");
  require(static_cast<int>(obs.x.size()) == cfg_.p, "monitor: dimension mismatch");
  Vec x(cfg_.p);
  for (int l = 0; l < cfg_.p; ++l) x[l] = obs.x[l] - center_[l];
  cusum_.push({obs.t, x});
  for (auto& [q, tab] : tables_) tab.extend(x);

  const long k = obs.t;
  const double w = boundary_w(cfg_.boundary, static_cast<double>(k) / cfg_.n - 1.0);
  last_ = KRecord{};
  last_.k = k;
  std::vector<int> triggered;
  std::map<int, long> argmax;
  for (int q : cfg_.q_set) {
    if (k < cfg_.n + q + 1) continue;  // per-q trimming
    double stat;
    long am;
    if (q == 2) {
      std::tie(stat, am) = t2_stat(cusum_, cfg_.n, k, sigma_f_, &ops_[2]);
    } else {
      std::tie(stat, am) = tq_stat(tables_.at(q), cfg_.n, k, norms_.lq.at(q), &ops_[q]);
    }
    const double thr = c_.at(q) * w;
    last_.stats[q] = stat;
    last_.thresholds[q] = thr;
    argmax[q] = am;
    if (stat > thr) triggered.push_back(q);
  }
  if (triggered.empty()) return StepDecision::Continue;
  AlarmEvent ev;
  ev.k_alarm = k;
  ev.triggered_q = triggered;
  ev.stats = last_.stats;
  ev.trigger_q = triggered.front();
  ev.m_hat = argmax.at(ev.trigger_q);
  alarm_ = std::move(ev);
  return StepDecision::Alarm;
}

const AlarmEvent& Monitor::alarm() const {
  require(alarmed(), "monitor: no alarm raised");
  return *alarm_;
}

long Monitor::locate_change(int q) const {
  require(alarmed(), "monitor: locate_change before alarm");
  const long k = alarm_->k_alarm;
  require(k >= cfg_.n + q + 1, "monitor: q not active at the alarm time");
  if (q == 2) return t2_stat(cusum_, cfg_.n, k, sigma_f_).second;
  return tq_stat(tables_.at(q), cfg_.n, k, norms_.lq.at(q)).second;
}

std::uint64_t Monitor::scan_ops(int q) const {
  auto it = ops_.find(q);
  require(it != ops_.end(), "monitor: unknown q");
  return it->second;
}

}  // namespace hdmon
