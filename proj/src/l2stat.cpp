#include "hdmon/l2stat.hpp"

namespace hdmon {

namespace {

void check_range(long n, long m, long k, long t_now) {
  require(k <= t_now, "l2stat: k beyond stored data");
  require(k >= n + 3, "l2stat: k below trimming threshold");
  require(m >= n + 1 && m <= k - 2, "l2stat: m outside trimmed range");
}

}  // namespace

double g_stat(const CusumState& s, long n, long m, long k) {
  check_range(n, m, k, s.t_now());
  const double km = static_cast<double>(k - m);
  const double md = static_cast<double>(m);
  return km * (km - 1.0) * s.pair_sum(1, m) + md * (md - 1.0) * s.pair_sum(m + 1, k) -
         (md - 1.0) * (km - 1.0) * s.cross_sum(m, k);
}

std::pair<double, long> t2_stat(const CusumState& s, long n, long k, double sigma_f_hat,
                                std::uint64_t* op_counter) {
  require(k >= n + 3, "t2_stat: k < n+3 leaves no admissible m");
  require(sigma_f_hat > 0.0, "t2_stat: nonpositive norm estimate");
  require(k <= s.t_now(), "t2_stat: k beyond stored data");
  const int p = s.dim();
  double best = 0.0;
  long best_m = -1;
  for (long m = n + 1; m <= k - 2; ++m) {
    const double g = g_stat(s, n, m, k);
    if (best_m < 0 || g > best) {
      best = g;
      best_m = m;
    }
    if (op_counter) *op_counter += 3u * static_cast<std::uint64_t>(p);
  }
  const double nn = static_cast<double>(n);
  return {best / (nn * nn * nn * sigma_f_hat), best_m};
}

L2Scan l2_scan(const CusumState& s, long n, long k, double sigma_f_hat) {
  require(k >= n + 3, "l2_scan: k < n+3 leaves no admissible m");
  require(sigma_f_hat > 0.0, "l2_scan: nonpositive norm estimate");
  L2Scan out;
  out.k = k;
  for (long m = n + 1; m <= k - 2; ++m) out.g_values.emplace_back(m, g_stat(s, n, m, k));
  const double nn = static_cast<double>(n);
  double best = out.g_values.front().second;
  long best_m = out.g_values.front().first;
  for (const auto& [m, g] : out.g_values) {
    if (g > best) {
      best = g;
      best_m = m;
    }
  }
  out.t_stat = best / (nn * nn * nn * sigma_f_hat);
  out.argmax_m = best_m;
  return out;
}

double g_stat_bruteforce(const std::vector<Vec>& data, long n, long m, long k) {
  require(k <= static_cast<long>(data.size()), "l2stat: k beyond data");
  require(k >= n + 3 && m >= n + 1 && m <= k - 2, "l2stat: indices outside trimmed range");
  const std::size_t p = data.front().size();
  auto dot = [&](long i, long j) {
    double acc = 0.0;
    for (std::size_t l = 0; l < p; ++l) acc += data[i - 1][l] * data[j - 1][l];
    return acc;
  };
  double s1 = 0.0;
  for (long i = 1; i <= m; ++i)
    for (long j = i + 1; j <= m; ++j) s1 += dot(i, j);
  double s2 = 0.0;
  for (long i = m + 1; i <= k; ++i)
    for (long j = i + 1; j <= k; ++j) s2 += dot(i, j);
  double cr = 0.0;
  for (long i = 1; i <= m; ++i)
    for (long j = m + 1; j <= k; ++j) cr += dot(i, j);
  const double km = static_cast<double>(k - m);
  const double md = static_cast<double>(m);
  return km * (km - 1.0) * s1 + md * (md - 1.0) * s2 - (md - 1.0) * (km - 1.0) * cr;
}

std::pair<double, long> t2_stat_bruteforce(const std::vector<Vec>& data, long n, long k,
                                           double sigma_f_hat) {
  require(k >= n + 3, "t2_stat_bruteforce: k < n+3");
  require(sigma_f_hat > 0.0, "t2_stat_bruteforce: nonpositive norm estimate");
  const std::size_t p = data.front().size();
  // rebuild prefix sums from raw data at every call
  std::vector<Vec> bpref(k + 1, Vec(p, 0.0));
  Vec cpref(k + 1, 0.0);
  for (long t = 1; t <= k; ++t) {
    double sq = 0.0;
    for (std::size_t l = 0; l < p; ++l) {
      bpref[t][l] = bpref[t - 1][l] + data[t - 1][l];
      sq += data[t - 1][l] * data[t - 1][l];
    }
    cpref[t] = cpref[t - 1] + sq;
  }
  auto seg = [&](long a, long b) {
    double quad = 0.0;
    for (std::size_t l = 0; l < p; ++l) {
      const double d = bpref[b][l] - bpref[a - 1][l];
      quad += d * d;
    }
    return 0.5 * (quad - (cpref[b] - cpref[a - 1]));
  };
  double best = 0.0;
  long best_m = -1;
  for (long m = n + 1; m <= k - 2; ++m) {
    double cr = 0.0;
    for (std::size_t l = 0; l < p; ++l) cr += bpref[m][l] * (bpref[k][l] - bpref[m][l]);
    const double km = static_cast<double>(k - m);
    const double md = static_cast<double>(m);
    const double g =
        km * (km - 1.0) * seg(1, m) + md * (md - 1.0) * seg(m + 1, k) - (md - 1.0) * (km - 1.0) * cr;
    if (best_m < 0 || g > best) {
      best = g;
      best_m = m;
    }
  }
  const double nn = static_cast<double>(n);
  return {best / (nn * nn * nn * sigma_f_hat), best_m};
}

}  // namespace hdmon
