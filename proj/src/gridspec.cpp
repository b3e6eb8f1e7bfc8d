#include "hdmon/gridspec.hpp"

#include <cmath>

namespace hdmon {

void GridSpec::validate() const {
  require(T > 1.0, "grid: T must exceed 1");
  require(g >= 1, "grid: g must be positive");
  const double steps = (T - 1.0) * g;
  require(std::abs(steps - std::round(steps)) < 1e-9, "grid: (T-1)*g must be integral");
}

std::vector<double> GridSpec::t_grid() const {
  validate();
  const long m = static_cast<long>(std::llround((T - 1.0) * g));
  std::vector<double> out;
  out.reserve(m + 1);
  for (long i = 0; i <= m; ++i) out.push_back(1.0 + static_cast<double>(i) / g);
  out.back() = T;  // exact endpoint
  return out;
}

std::vector<std::pair<double, double>> GridSpec::wedge_pairs() const {
  const auto tg = t_grid();
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(tg.size() * (tg.size() + 1) / 2);
  for (std::size_t ti = 0; ti < tg.size(); ++ti)
    for (std::size_t si = 0; si <= ti; ++si) pairs.emplace_back(tg[si], tg[ti]);
  return pairs;
}

}  // namespace hdmon
