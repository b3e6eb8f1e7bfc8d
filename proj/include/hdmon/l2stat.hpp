#pragma once

#include <utility>

#include "hdmon/cusum.hpp"

namespace hdmon {

struct L2Scan {
  long k = 0;
  std::vector<std::pair<long, double>> g_values;  // (m, G_k(m)) over the trimmed range
  double t_stat = 0.0;
  long argmax_m = 0;
};

// G_k(m) = (k-m)(k-m-1) S(1,m) + m(m-1) S(m+1,k) - (m-1)(k-m-1) Cross(m,k),
// evaluated from the CUSUM identities in O(p).
double g_stat(const CusumState& s, long n, long m, long k);

// T_{n,2}(k) = max_m G_k(m) / (n^3 sigma_f_hat), m = n+1..k-2, smallest m on ties.
// op_counter, when given, accumulates the number of scalar multiply-adds spent
// in the scan (used by the complexity tests).
std::pair<double, long> t2_stat(const CusumState& s, long n, long k, double sigma_f_hat,
                                std::uint64_t* op_counter = nullptr);

L2Scan l2_scan(const CusumState& s, long n, long k, double sigma_f_hat);

// Naive oracle: same expansion evaluated with raw double loops, O(k^2 p).
// data is 1-based via data[i-1].
double g_stat_bruteforce(const std::vector<Vec>& data, long n, long m, long k);

// Full-recompute monitoring path used for the performance comparison: at each
// k it rebuilds the prefix sums from raw data and rescans all m.
std::pair<double, long> t2_stat_bruteforce(const std::vector<Vec>& data, long n, long k,
                                           double sigma_f_hat);

}  // namespace hdmon
