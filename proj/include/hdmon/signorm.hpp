#pragma once

#include <map>
#include <string>

#include "hdmon/common.hpp"

namespace hdmon {

// Phase-I estimates of the covariance norms. frob_sq can come out negative in
// finite samples; consumers must reject nonpositive values, never clamp.
struct NormEstimates {
  long n_train = 0;
  double frob_sq = 0.0;                  // estimate of ||Sigma||_F^2
  std::map<int, double> lq;              // q -> estimate of ||Sigma||_q^q
  std::map<int, std::string> method;     // q -> "complete" | "incomplete(N=..,seed=..)"
};

// Four-index U-statistic for ||Sigma||_F^2:
//   (1/(4 C(n,4))) sum_{j1<j2<j3<j4} [(X_j1 - X_j2)' (X_j3 - X_j4)]^2,
// reduced to O(n^2 p + n^2) via Gram-matrix prefix sums.
double frob_sq_complete(const std::vector<Vec>& rows);

// Incomplete U-statistic for ||Sigma||_q^q with N uniformly sampled sorted
// index tuples i1<..<iq<j1<..<jq. Deterministic given (data, q, N, seed).
double lq_norm_incomplete(const std::vector<Vec>& rows, int q, long n_samples,
                          std::uint64_t seed);

// Complete estimator by full enumeration; guarded by C(n,2q) <= 1e6.
double lq_norm_bruteforce(const std::vector<Vec>& rows, int q);

// Policy assembly: complete Frobenius estimator for q = 2, incomplete for
// q >= 4 (default N = 50 n when n_samples == 0).
NormEstimates estimate_norms(const std::vector<Vec>& rows, const std::vector<int>& q_set,
                             long n_samples, std::uint64_t seed);

}  // namespace hdmon
