#include "hdmon/datagen.hpp"

#include <cmath>

namespace hdmon {

MonitorConfig ScenarioSpec::monitor_config() const {
  MonitorConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.q_set = q_set;
  cfg.T = T;
  cfg.alpha = alpha;
  cfg.boundary = boundary;
  cfg.seed = seed;
  return cfg;
}

void ScenarioSpec::validate() const {
  monitor_config().validate();
  require(rho >= 0.0 && rho < 1.0, "scenario: rho outside [0,1)");
  require(r_sparsity >= 1 && r_sparsity <= p, "scenario: r outside [1,p]");
  require(reps >= 1, "scenario: reps must be positive");
  if (delta > 0.0) {
    const long ks = change_time();
    require(ks > n && ks <= horizon(), "scenario: change time outside (n, horizon]");
  }
}

std::vector<Vec> gen_stream(const ScenarioSpec& spec, long rep_index) {
  spec.validate();
  auto rng = rng_stream(spec.seed, static_cast<std::uint64_t>(rep_index));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const long horizon = spec.horizon();
  const long ks = spec.delta > 0.0 ? spec.change_time() : horizon + 1;
  const double shift = spec.delta > 0.0
                           ? std::sqrt(spec.delta / static_cast<double>(spec.r_sparsity))
                           : 0.0;
  const double carry = spec.rho;
  const double fresh = std::sqrt(1.0 - spec.rho * spec.rho);
  std::vector<Vec> rows(horizon, Vec(spec.p));
  for (long t = 1; t <= horizon; ++t) {
    Vec& x = rows[t - 1];
    // AR(1) across coordinates reproduces Sigma_ij = rho^|i-j| exactly
    x[0] = gauss(rng);
    for (int j = 1; j < spec.p; ++j) x[j] = carry * x[j - 1] + fresh * gauss(rng);
    if (t >= ks)
      for (int j = 0; j < spec.r_sparsity; ++j) x[j] += shift;
  }
  return rows;
}

}  // namespace hdmon
