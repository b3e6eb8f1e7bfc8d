#pragma once

#include <map>
#include <optional>
#include <string>

#include "hdmon/config.hpp"
#include "hdmon/gridspec.hpp"

namespace hdmon {

inline constexpr const char* kLibraryVersion = "0.1.0";

// A critical-value table holds the sorted Monte-Carlo sample of the sup
// functional on the *statistic scale*: its quantiles are directly comparable
// to T_{n,q}(k)/w(k/n-1).
struct TableKey {
  std::string engine;   // "gaussian" | "brownian" | "empirical"
  int q = 2;
  std::string lane;     // "l2" (G_k / n^3 sigma_F) or "uq" (U_q / sqrt(n^{3q} sigma_q^q))
  double T = 2.0;
  std::string boundary = "T2";
  int grid_g = 0;       // process-simulation grid (0 for empirical)
  long n_sim = 0;       // empirical engine only
  int p_sim = 0;        // empirical engine only
  std::string norms = "true";  // empirical engine: "true" (plug-in) or "estimated"
  long replications = 0;
  std::uint64_t seed = 0;

  bool operator==(const TableKey&) const = default;
  std::string filename() const;
  void validate() const;
};

struct CriticalValueTable {
  TableKey key;
  std::map<std::string, double> quantiles;  // "0.1", "0.05", "0.025", "0.01"
  Vec sample;                               // sorted sup sample (kept for re-quantiling)
  std::string version = kLibraryVersion;
  std::string created;

  double critical_value(double alpha) const;
};

// Type-7 empirical (1-alpha)-quantile; requires R*min(alpha,1-alpha) >= 50.
double critical_value_from_sample(const Vec& sorted_sample, double alpha);

CriticalValueTable build_table(const TableKey& key, int threads = 0);

void save_table(const std::string& path, const CriticalValueTable& table);
CriticalValueTable load_table(const std::string& path, const TableKey& want);
CriticalValueTable get_or_build(const std::string& cache_dir, const TableKey& key,
                                int threads = 0);

// Default table key for a monitor lane under the given engine.
TableKey default_key(const std::string& engine, int q, double T, BoundaryKind boundary,
                     long n, int p, std::uint64_t seed);

// Thresholds c_{alpha*} for every q in the config, built (or loaded) from the
// cache. alpha* is the per-test size after the multiple-q adjustment.
std::map<int, double> calibrate_thresholds(const MonitorConfig& cfg, const std::string& engine,
                                           const std::string& cache_dir, int threads = 0);

}  // namespace hdmon
