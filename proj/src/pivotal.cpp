#include "hdmon/pivotal.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "hdmon/cusum.hpp"
#include "hdmon/signorm.hpp"
#include "hdmon/l2stat.hpp"
#include "hdmon/lqstat.hpp"

namespace hdmon {

namespace {

double one_replication(const PivotalSpec& spec, std::uint64_t rep) {
  auto rng = rng_stream(spec.seed, rep);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const long n = spec.n_sim;
  const int p = spec.p_sim;
  const long horizon = static_cast<long>(std::floor(n * spec.T + 1e-9));
  double sigma_f = std::sqrt(static_cast<double>(p));  // ||I_p||_F
  double sigma_q = static_cast<double>(p);             // ||I_p||_q^q
  std::vector<Vec> rows(horizon, Vec(p));
  for (auto& r : rows)
    for (auto& v : r) v = gauss(rng);
  if (spec.estimate_norms) {
    std::vector<Vec> phase1(rows.begin(), rows.begin() + n);
    if (spec.q == 2) {
      const double est = frob_sq_complete(phase1);
      if (!(est > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      sigma_f = std::sqrt(est);
    } else {
      const long ns = spec.incomplete_samples > 0 ? spec.incomplete_samples : 50L * n;
      const double est =
          lq_norm_incomplete(phase1, spec.q, ns, spec.seed ^ (0x51ed2701ULL + rep));
      if (!(est > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      sigma_q = est;
    }
  }
  Vec x(p);
  double sup = -std::numeric_limits<double>::infinity();
  if (spec.q == 2) {
    CusumState st(p, horizon);
    for (long t = 1; t <= horizon; ++t) {
      st.push({t, rows[t - 1]});
      if (t >= n + 3) {
        const double stat = t2_stat(st, n, t, sigma_f).first;
        sup = std::max(sup, stat / boundary_w(spec.boundary, static_cast<double>(t) / n - 1.0));
      }
    }
  } else {
    ProductSumTables tab(spec.q, p, horizon);
    for (long t = 1; t <= horizon; ++t) {
      tab.extend(rows[t - 1]);
      if (t >= n + spec.q + 1) {
        const double stat = tq_stat(tab, n, t, sigma_q).first;
        sup = std::max(sup, stat / boundary_w(spec.boundary, static_cast<double>(t) / n - 1.0));
      }
    }
  }
  return sup;
}

}  // namespace

Vec simulate_sup_pivotal(const PivotalSpec& spec, int threads) {
  require(spec.R >= 1, "pivotal: R must be positive");
  require(spec.q == 2 || (spec.q >= 4 && spec.q % 2 == 0 && spec.q <= 8),
          "pivotal: q must be even, 2..8");
  require(spec.n_sim >= 8 && spec.p_sim >= 1, "pivotal: bad n_sim/p_sim");
  Vec out(spec.R);
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, spec.R)));
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  auto worker = [&]() {
    while (true) {
      const long r = next.fetch_add(1);
      if (r >= spec.R) break;
      out[r] = one_replication(spec, static_cast<std::uint64_t>(r));
    }
  };
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  // replications whose phase-I estimate failed are excluded, as they would
  // error out of the monitor rather than produce a statistic
  Vec kept;
  kept.reserve(out.size());
  for (double v : out)
    if (std::isfinite(v)) kept.push_back(v);
  require(!kept.empty(), "pivotal: every replication failed");
  return kept;
}

}  // namespace hdmon
