#pragma once

#include "hdmon/config.hpp"

namespace hdmon {

// Finite-sample pivotal reference: the actual monitoring statistic run on
// i.i.d. N(0, I_p) data with the true norms plugged in. Matches the monitor's
// finite-(n,p) null law rather than the n,p -> infinity limit.
struct PivotalSpec {
  long n_sim = 100;
  int p_sim = 50;
  int q = 2;           // statistic order; q = 2 uses the L2 lane normalization
  double T = 2.0;
  BoundaryKind boundary = BoundaryKind::T2;
  long R = 4000;
  std::uint64_t seed = 0;
  // When set, each replication re-estimates the norm from its own phase-I
  // block exactly the way the monitor does, so the reference law carries the
  // estimator noise. Otherwise the true norms of I_p are plugged in.
  bool estimate_norms = false;
  long incomplete_samples = 0;  // 0 = 50 n, as in the monitor default
};

// Samples of max_k T_{n,q}(k) / w(k/n - 1) over the closed-end horizon.
// Deterministic given the spec, independent of thread count.
Vec simulate_sup_pivotal(const PivotalSpec& spec, int threads = 0);

}  // namespace hdmon
