#pragma once

#include <span>

#include "hdmon/config.hpp"

namespace hdmon {

// The two CUSUM processes B_t = sum_{i<=t} X_i and C_t = sum_{i<=t} X_i'X_i,
// stored for every t up to the closed-end horizon. Single writer; readers may
// evaluate statistics on a quiescent state from other threads.
class CusumState {
 public:
  CusumState(int p, long horizon);

  void push(const Observation& obs);

  long t_now() const { return t_now_; }
  int dim() const { return p_; }
  long horizon() const { return horizon_; }

  // B_t as a span (t = 0 yields the zero vector).
  std::span<const double> b_row(long t) const;
  double c_at(long t) const;  // C_t, C_0 = 0

  // x_t recovered as B_t - B_{t-1}
  void recover_x(long t, Vec& out) const;

  // S(a,b) = sum_{a <= i < j <= b} X_i' X_j
  double pair_sum(long a, long b) const;

  // sum_{i<=m} sum_{j=m+1..k} X_i' X_j = B_m' (B_k - B_m)
  double cross_sum(long m, long k) const;

 private:
  int p_;
  long horizon_;
  long t_now_ = 0;
  Vec b_;       // horizon * p, row t at offset (t-1)*p
  Vec c_;       // horizon entries
  Vec zero_;    // p zeros, backs b_row(0)
};

}  // namespace hdmon
