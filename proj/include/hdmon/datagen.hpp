#pragma once

#include <optional>

#include "hdmon/config.hpp"

namespace hdmon {

// Synthetic scenario: N(mu_i, Sigma) rows with Sigma_ij = rho^|i-j| and a
// sqrt(delta/r) shift on the first r coordinates from k_star onward.
struct ScenarioSpec {
  long n = 100;
  int p = 50;
  double T = 2.0;
  double rho = 0.0;
  double delta = 0.0;             // total shift energy ||mu||_2^2
  int r_sparsity = 1;             // number of shifted coordinates
  std::optional<long> k_star;     // default floor(1.25 n)+1 when delta > 0
  long reps = 500;
  double alpha = 0.1;
  BoundaryKind boundary = BoundaryKind::T2;
  std::vector<int> q_set{2, 6};
  std::uint64_t seed = 1;

  long horizon() const { return static_cast<long>(std::floor(n * T + 1e-9)); }
  long change_time() const {
    return k_star.value_or(static_cast<long>(std::floor(1.25 * n)) + 1);
  }
  MonitorConfig monitor_config() const;
  void validate() const;
};

// Rows 1..horizon for one replication; deterministic in (seed, rep_index).
std::vector<Vec> gen_stream(const ScenarioSpec& spec, long rep_index);

}  // namespace hdmon
