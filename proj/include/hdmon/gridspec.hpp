#pragma once

#include <utility>
#include <vector>

#include "hdmon/config.hpp"

namespace hdmon {

// Uniform grid with g points per unit interval on [1, T] for the monitoring
// wedge {(s,t): 1 <= s <= t <= T}. Grid must hit 1 and T exactly.
struct GridSpec {
  double T = 2.0;
  int g = 32;

  void validate() const;
  std::vector<double> t_grid() const;
  // all wedge pairs (s,t), s <= t; includes the zero-variance diagonal
  std::vector<std::pair<double, double>> wedge_pairs() const;
};

}  // namespace hdmon
