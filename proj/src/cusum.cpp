#include "hdmon/cusum.hpp"

#include <cmath>

namespace hdmon {

CusumState::CusumState(int p, long horizon) : p_(p), horizon_(horizon), zero_(p, 0.0) {
  require(p >= 1, "cusum: dimension must be positive");
  require(horizon >= 1, "cusum: horizon must be positive");
  b_.reserve(static_cast<std::size_t>(horizon) * p);
  c_.reserve(static_cast<std::size_t>(horizon));
}

void CusumState::push(const Observation& obs) {
  require(obs.t == t_now_ + 1, "cusum: non-contiguous time index");
  require(static_cast<int>(obs.x.size()) == p_, "cusum: dimension mismatch");
  require(t_now_ < horizon_, "cusum: past closed-end horizon");
  double sq = 0.0;
  const double* prev = t_now_ == 0 ? zero_.data() : b_.data() + (t_now_ - 1) * p_;
  for (int l = 0; l < p_; ++l) {
    const double v = obs.x[l];
    require(std::isfinite(v), "cusum: non-finite entry");
    b_.push_back(prev[l] + v);
    sq += v * v;
  }
  c_.push_back((t_now_ == 0 ? 0.0 : c_[t_now_ - 1]) + sq);
  ++t_now_;
}

std::span<const double> CusumState::b_row(long t) const {
  require(t >= 0 && t <= t_now_, "cusum: index out of stored range");
  if (t == 0) return {zero_.data(), static_cast<std::size_t>(p_)};
  return {b_.data() + (t - 1) * p_, static_cast<std::size_t>(p_)};
}

double CusumState::c_at(long t) const {
  require(t >= 0 && t <= t_now_, "cusum: index out of stored range");
  return t == 0 ? 0.0 : c_[t - 1];
}

void CusumState::recover_x(long t, Vec& out) const {
  require(t >= 1 && t <= t_now_, "cusum: index out of stored range");
  out.resize(p_);
  auto bt = b_row(t);
  auto bp = b_row(t - 1);
  for (int l = 0; l < p_; ++l) out[l] = bt[l] - bp[l];
}

double CusumState::pair_sum(long a, long b) const {
  require(a >= 1 && a <= b && b <= t_now_, "pair_sum: indices out of stored range");
  auto bb = b_row(b);
  auto ba = b_row(a - 1);
  double quad = 0.0;
  for (int l = 0; l < p_; ++l) {
    const double d = bb[l] - ba[l];
    quad += d * d;
  }
  return 0.5 * (quad - (c_at(b) - c_at(a - 1)));
}

double CusumState::cross_sum(long m, long k) const {
  require(m >= 1 && m < k && k <= t_now_, "cross_sum: indices out of stored range");
  auto bm = b_row(m);
  auto bk = b_row(k);
  double acc = 0.0;
  for (int l = 0; l < p_; ++l) acc += bm[l] * (bk[l] - bm[l]);
  return acc;
}

}  // namespace hdmon
