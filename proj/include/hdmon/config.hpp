#pragma once

#include <cmath>
#include <set>
#include <vector>

#include "hdmon/common.hpp"

namespace hdmon {

// One p-dimensional arrival. Time indices are 1-based.
struct Observation {
  long t = 0;
  Vec x;
};

enum class BoundaryKind { T1, T2, T3 };

inline const char* boundary_name(BoundaryKind b) {
  switch (b) {
    case BoundaryKind::T1: return "T1";
    case BoundaryKind::T2: return "T2";
    case BoundaryKind::T3: return "T3";
  }
  return "?";
}

inline BoundaryKind boundary_from_name(const std::string& s) {
  if (s == "T1") return BoundaryKind::T1;
  if (s == "T2") return BoundaryKind::T2;
  if (s == "T3") return BoundaryKind::T3;
  throw std::invalid_argument("unknown boundary: " + s);
}

// Threshold weight w(t), t >= 0.
inline double boundary_w(BoundaryKind kind, double t) {
  require(t >= 0.0, "boundary_w: negative t");
  switch (kind) {
    case BoundaryKind::T1: return 1.0;
    case BoundaryKind::T2: return (t + 1.0) * (t + 1.0);
    case BoundaryKind::T3:
      return (t + 1.0) * (t + 1.0) * std::max(std::sqrt(t / (t + 1.0)), 1e-10);
  }
  return 1.0;
}

struct MonitorConfig {
  long n = 100;                 // Phase-I length
  int p = 1;                    // dimension
  std::vector<int> q_set{2, 6};  // even orders, ascending
  double T = 2.0;               // horizon multiplier
  double alpha = 0.1;           // global size
  BoundaryKind boundary = BoundaryKind::T2;
  std::uint64_t seed = 0;

  long horizon() const { return static_cast<long>(std::floor(n * T + 1e-9)); }

  int max_q() const {
    int m = 0;
    for (int q : q_set) m = std::max(m, q);
    return m;
  }

  void validate() const {
    require(n >= 8, "config: n must be >= 8");
    require(p >= 1, "config: p must be >= 1");
    require(T > 1.0, "config: T must exceed 1");
    require(alpha > 0.0 && alpha < 1.0, "config: alpha outside (0,1)");
    require(!q_set.empty(), "config: q_set empty");
    for (int q : q_set) {
      require(q >= 2 && q % 2 == 0, "config: q must be even and >= 2");
      require(q <= 8, "config: q capped at 8");
    }
    require(std::is_sorted(q_set.begin(), q_set.end()), "config: q_set must be ascending");
    require(n > 2L * max_q(), "config: n must exceed 2*max(q)");
    require(horizon() > n + max_q() + 1, "config: horizon leaves no monitoring step");
  }
};

}  // namespace hdmon
