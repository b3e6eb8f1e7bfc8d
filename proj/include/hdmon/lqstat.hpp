#pragma once

#include <utility>

#include "hdmon/config.hpp"

namespace hdmon {

// Ordered-distinct-tuple product sums B(c,t,l) = sum* over c-tuples of
// distinct indices <= t of prod X_{i_s,l}, maintained incrementally for all
// t up to the horizon. The ordered-tuple recursion picks up a factor c:
//   B(c,t+1,l) = B(c,t,l) + c * X_{t+1,l} * B(c-1,t,l).
class ProductSumTables {
 public:
  ProductSumTables(int q, int p, long horizon);

  void extend(const Vec& x_new);

  int q() const { return q_; }
  int p() const { return p_; }
  long t_now() const { return t_now_; }

  // B(c,t,l); zero when c > t, one when c == 0.
  double b(int c, long t, int l) const;
  const double* b_row(int c, long t) const;  // p values, valid for t >= 1

  // x_t recovered from the c=1 table
  void recover_x(long t, Vec& out) const;

 private:
  int q_;
  int p_;
  long horizon_;
  long t_now_ = 0;
  Vec data_;   // [(q+1) x horizon x p]: entry ((c*horizon)+(t-1))*p + l
  Vec ones_;   // row of ones backing c = 0
  Vec zeros_;
};

// M(c,l) over a window [j,k] of a fixed k, grown leftward one index at a
// time: M(c,[j,k],l) = M(c,[j+1,k],l) + c * X_{j,l} * M(c-1,[j+1,k],l).
class MWindow {
 public:
  MWindow(int q, int p);
  void reset();                  // empty window
  void prepend(const Vec& xj);   // extend window to the left
  double at(int c, int l) const { return m_[static_cast<std::size_t>(c) * p_ + l]; }
  const double* row(int c) const { return m_.data() + static_cast<std::size_t>(c) * p_; }
  long len() const { return len_; }

 private:
  int q_;
  int p_;
  long len_ = 0;
  Vec m_;
};

// S_{n,q,c}(m;1,k) = sum_l B(c,m,l) * M(q-c,[m+1,k],l)  (ordered-tuple sums).
double s_stat(const ProductSumTables& t, int c, long n, long m, long k);

// U_{n,q}(k,m) = sum_c (-1)^{q-c} C(q,c) P_{q-c}^{m-c} P_c^{k-m-q+c} S_{n,q,c}(m;1,k).
double u_stat(const ProductSumTables& t, long n, long m, long k);

struct LqScan {
  long k = 0;
  std::vector<std::pair<long, double>> u_values;  // (m, U_{n,q}(k,m))
  double t_stat = 0.0;
  long argmax_m = 0;
};

// T_{n,q}(k) = max_m U_{n,q}(k,m) / sqrt(n^{3q} sigma_q_hat), m = n+1..k-q.
std::pair<double, long> tq_stat(const ProductSumTables& t, long n, long k, double sigma_q_hat,
                                std::uint64_t* op_counter = nullptr);

LqScan lq_scan(const ProductSumTables& t, long n, long k, double sigma_q_hat);

// Oracles (exhaustive enumeration on small instances).
double b_bruteforce(const std::vector<Vec>& data, int c, long t, int l);
double m_bruteforce(const std::vector<Vec>& data, int c, long lo, long hi, int l);
double u_stat_bruteforce(const std::vector<Vec>& data, int q, long m, long k);

// Full-rebuild path for the performance comparison: reconstructs the B tables
// from raw data at each k before scanning.
std::pair<double, long> tq_stat_bruteforce(const std::vector<Vec>& data, int q, long n, long k,
                                           double sigma_q_hat);

}  // namespace hdmon
