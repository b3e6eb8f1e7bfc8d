#include "hdmon/lqstat.hpp"

#include <cmath>
#include <numeric>

namespace hdmon {

ProductSumTables::ProductSumTables(int q, int p, long horizon)
    : q_(q), p_(p), horizon_(horizon), ones_(p, 1.0), zeros_(p, 0.0) {
  require(q >= 2 && q % 2 == 0, "lqstat: q must be even and >= 2");
  require(q <= 8, "lqstat: q capped at 8");
  require(p >= 1 && horizon >= 1, "lqstat: bad dimensions");
  data_.assign(static_cast<std::size_t>(q + 1) * horizon * p, 0.0);
}

void ProductSumTables::extend(const Vec& x_new) {
  require(static_cast<int>(x_new.size()) == p_, "lqstat: dimension mismatch");
  require(t_now_ < horizon_, "lqstat: past closed-end horizon");
  const long t = t_now_ + 1;
  const std::size_t stride = static_cast<std::size_t>(horizon_) * p_;
  // c = 0 row is implicit (ones); build c = 1..q using the previous column.
  for (int c = q_; c >= 1; --c) {
    double* dst = data_.data() + c * stride + static_cast<std::size_t>(t - 1) * p_;
    const double* prev_same = t == 1 ? zeros_.data() : dst - p_;
    const double* prev_below =
        c == 1 ? ones_.data()
                : (t == 1 ? zeros_.data()
                          : data_.data() + (c - 1) * stride + static_cast<std::size_t>(t - 2) * p_);
    const double cd = static_cast<double>(c);
    for (int l = 0; l < p_; ++l) dst[l] = prev_same[l] + cd * x_new[l] * prev_below[l];
  }
  ++t_now_;
}

double ProductSumTables::b(int c, long t, int l) const {
  require(c >= 0 && c <= q_, "lqstat: c out of range");
  require(t >= 0 && t <= t_now_, "lqstat: t out of range");
  require(l >= 0 && l < p_, "lqstat: l out of range");
  if (c == 0) return 1.0;
  if (c > t) return 0.0;
  return data_[(static_cast<std::size_t>(c) * horizon_ + (t - 1)) * p_ + l];
}

const double* ProductSumTables::b_row(int c, long t) const {
  require(c >= 0 && c <= q_ && t >= 1 && t <= t_now_, "lqstat: index out of range");
  if (c == 0) return ones_.data();
  return data_.data() + (static_cast<std::size_t>(c) * horizon_ + (t - 1)) * p_;
}

void ProductSumTables::recover_x(long t, Vec& out) const {
  require(t >= 1 && t <= t_now_, "lqstat: t out of range");
  out.resize(p_);
  const double* cur = b_row(1, t);
  if (t == 1) {
    for (int l = 0; l < p_; ++l) out[l] = cur[l];
  } else {
    const double* prev = b_row(1, t - 1);
    for (int l = 0; l < p_; ++l) out[l] = cur[l] - prev[l];
  }
}

MWindow::MWindow(int q, int p) : q_(q), p_(p) { reset(); }

void MWindow::reset() {
  m_.assign(static_cast<std::size_t>(q_ + 1) * p_, 0.0);
  for (int l = 0; l < p_; ++l) m_[l] = 1.0;  // empty product
  len_ = 0;
}

void MWindow::prepend(const Vec& xj) {
  require(static_cast<int>(xj.size()) == p_, "lqstat: dimension mismatch");
  for (int c = q_; c >= 1; --c) {
    double* cur = m_.data() + static_cast<std::size_t>(c) * p_;
    const double* below = m_.data() + static_cast<std::size_t>(c - 1) * p_;
    const double cd = static_cast<double>(c);
    for (int l = 0; l < p_; ++l) cur[l] += cd * xj[l] * below[l];
  }
  ++len_;
}

namespace {

void check_lq_range(int q, long n, long m, long k, long t_now) {
  require(k <= t_now, "lqstat: k beyond stored data");
  require(k >= n + q + 1, "lqstat: k below trimming threshold");
  require(m >= n + 1 && m <= k - q, "lqstat: m outside trimmed range");
}

}  // namespace

double s_stat(const ProductSumTables& t, int c, long n, long m, long k) {
  require(c >= 0 && c <= t.q(), "s_stat: c out of range");
  check_lq_range(t.q(), n, m, k, t.t_now());
  MWindow win(t.q(), t.p());
  Vec x;
  for (long j = k; j >= m + 1; --j) {
    t.recover_x(j, x);
    win.prepend(x);
  }
  double acc = 0.0;
  for (int l = 0; l < t.p(); ++l) acc += t.b(c, m, l) * win.at(t.q() - c, l);
  return acc;
}

namespace {

double u_from_window(const ProductSumTables& t, const MWindow& win, long m, long k) {
  const int q = t.q();
  const int p = t.p();
  double acc = 0.0;
  for (int c = 0; c <= q; ++c) {
    double s = 0.0;
    const double* brow = t.b_row(c, m);
    const double* mrow = win.row(q - c);
    for (int l = 0; l < p; ++l) s += brow[l] * mrow[l];
    const double coeff = binom_coeff(q, c) * falling_factorial(m - c, q - c) *
                         falling_factorial(k - m - q + c, c);
    const double sign = ((q - c) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * coeff * s;
  }
  return acc;
}

}  // namespace

double u_stat(const ProductSumTables& t, long n, long m, long k) {
  check_lq_range(t.q(), n, m, k, t.t_now());
  MWindow win(t.q(), t.p());
  Vec x;
  for (long j = k; j >= m + 1; --j) {
    t.recover_x(j, x);
    win.prepend(x);
  }
  return u_from_window(t, win, m, k);
}

std::pair<double, long> tq_stat(const ProductSumTables& t, long n, long k, double sigma_q_hat,
                                std::uint64_t* op_counter) {
  const int q = t.q();
  require(k >= n + q + 1, "tq_stat: k below trimming threshold");
  require(sigma_q_hat > 0.0, "tq_stat: nonpositive norm estimate");
  require(k <= t.t_now(), "tq_stat: k beyond stored data");
  MWindow win(q, t.p());
  Vec x;
  double best = 0.0;
  long best_m = -1;
  // grow the window leftward; at window [m+1,k] evaluate U(k,m)
  for (long j = k; j >= n + 2; --j) {
    t.recover_x(j, x);
    win.prepend(x);
    if (op_counter) *op_counter += static_cast<std::uint64_t>(q) * t.p();
    const long m = j - 1;
    if (m > k - q || m < n + 1) continue;
    const double u = u_from_window(t, win, m, k);
    if (op_counter) *op_counter += static_cast<std::uint64_t>(q + 1) * t.p();
    if (best_m < 0 || u >= best) {  // sweeping m downward: >= keeps smallest maximizer
      best = u;
      best_m = m;
    }
  }
  const double denom = std::sqrt(std::pow(static_cast<double>(n), 3.0 * q) * sigma_q_hat);
  return {best / denom, best_m};
}

LqScan lq_scan(const ProductSumTables& t, long n, long k, double sigma_q_hat) {
  const int q = t.q();
  require(k >= n + q + 1, "lq_scan: k below trimming threshold");
  require(sigma_q_hat > 0.0, "lq_scan: nonpositive norm estimate");
  LqScan out;
  out.k = k;
  MWindow win(q, t.p());
  Vec x;
  for (long j = k; j >= n + 2; --j) {
    t.recover_x(j, x);
    win.prepend(x);
    const long m = j - 1;
    if (m > k - q || m < n + 1) continue;
    out.u_values.emplace_back(m, u_from_window(t, win, m, k));
  }
  std::reverse(out.u_values.begin(), out.u_values.end());  // ascending m
  double best = out.u_values.front().second;
  long best_m = out.u_values.front().first;
  for (const auto& [m, u] : out.u_values) {
    if (u > best) {
      best = u;
      best_m = m;
    }
  }
  const double denom = std::sqrt(std::pow(static_cast<double>(n), 3.0 * q) * sigma_q_hat);
  out.t_stat = best / denom;
  out.argmax_m = best_m;
  return out;
}

double b_bruteforce(const std::vector<Vec>& data, int c, long t, int l) {
  require(t <= static_cast<long>(data.size()), "b_bruteforce: t beyond data");
  if (c == 0) return 1.0;
  if (c > t) return 0.0;
  // ordered distinct tuples = c! * sum over increasing tuples
  std::vector<long> idx(c);
  double total = 0.0;
  // iterative enumeration of increasing c-subsets of {1..t}
  for (int i = 0; i < c; ++i) idx[i] = i + 1;
  while (true) {
    double prod = 1.0;
    for (int i = 0; i < c; ++i) prod *= data[idx[i] - 1][l];
    total += prod;
    int pos = c - 1;
    while (pos >= 0 && idx[pos] == t - (c - 1 - pos)) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < c; ++i) idx[i] = idx[i - 1] + 1;
  }
  return factorial_d(c) * total;
}

double m_bruteforce(const std::vector<Vec>& data, int c, long lo, long hi, int l) {
  require(hi <= static_cast<long>(data.size()), "m_bruteforce: hi beyond data");
  if (c == 0) return 1.0;
  const long len = hi - lo + 1;
  if (len <= 0 || c > len) return 0.0;
  std::vector<long> idx(c);
  for (int i = 0; i < c; ++i) idx[i] = lo + i;
  double total = 0.0;
  while (true) {
    double prod = 1.0;
    for (int i = 0; i < c; ++i) prod *= data[idx[i] - 1][l];
    total += prod;
    int pos = c - 1;
    while (pos >= 0 && idx[pos] == hi - (c - 1 - pos)) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < c; ++i) idx[i] = idx[i - 1] + 1;
  }
  return factorial_d(c) * total;
}

double u_stat_bruteforce(const std::vector<Vec>& data, int q, long m, long k) {
  require(k <= static_cast<long>(data.size()), "u_stat_bruteforce: k beyond data");
  require(m >= q && k - m >= q, "u_stat_bruteforce: blocks shorter than q");
  const std::size_t p = data.front().size();
  // sorted i-subsets of [1,m] x ordered j-tuples of (m,k], multiplied by q!
  // (joint relabeling makes i-order irrelevant once j-tuples are ordered).
  std::vector<long> is(q), js(q);
  double total = 0.0;
  for (int i = 0; i < q; ++i) is[i] = i + 1;
  while (true) {
    // enumerate ordered distinct j-tuples via permutations of increasing subsets
    std::vector<long> base(q);
    for (int i = 0; i < q; ++i) base[i] = m + 1 + i;
    while (true) {
      std::vector<long> perm = base;
      std::sort(perm.begin(), perm.end());
      do {
        for (std::size_t l = 0; l < p; ++l) {
          double prod = 1.0;
          for (int a = 0; a < q; ++a) prod *= data[is[a] - 1][l] - data[perm[a] - 1][l];
          total += prod;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      int pos = q - 1;
      while (pos >= 0 && base[pos] == k - (q - 1 - pos)) --pos;
      if (pos < 0) break;
      ++base[pos];
      for (int i = pos + 1; i < q; ++i) base[i] = base[i - 1] + 1;
    }
    int pos = q - 1;
    while (pos >= 0 && is[pos] == m - (q - 1 - pos)) --pos;
    if (pos < 0) break;
    ++is[pos];
    for (int i = pos + 1; i < q; ++i) is[i] = is[i - 1] + 1;
  }
  return factorial_d(q) * total;
}

std::pair<double, long> tq_stat_bruteforce(const std::vector<Vec>& data, int q, long n, long k,
                                           double sigma_q_hat) {
  require(k >= n + q + 1, "tq_stat_bruteforce: k below trimming threshold");
  require(sigma_q_hat > 0.0, "tq_stat_bruteforce: nonpositive norm estimate");
  const int p = static_cast<int>(data.front().size());
  ProductSumTables fresh(q, p, k);
  for (long t = 1; t <= k; ++t) fresh.extend(data[t - 1]);
  return tq_stat(fresh, n, k, sigma_q_hat);
}

}  // namespace hdmon
