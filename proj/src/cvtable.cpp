#include "hdmon/cvtable.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "hdmon/gpsim.hpp"
#include "hdmon/pivotal.hpp"

namespace hdmon {

using nlohmann::json;

void TableKey::validate() const {
  require(engine == "gaussian" || engine == "brownian" || engine == "empirical",
          "table: unknown engine '" + engine + "'");
  require(q >= 2 && q % 2 == 0 && q <= 8, "table: q must be even, 2..8");
  require(lane == "l2" || lane == "uq", "table: lane must be 'l2' or 'uq'");
  if (lane == "l2") require(q == 2, "table: l2 lane implies q = 2");
  require(engine != "brownian" || q == 2, "table: brownian engine is q = 2 only");
  require(T > 1.0, "table: T must exceed 1");
  boundary_from_name(boundary);
  require(replications >= 1, "table: replications must be positive");
  if (engine == "empirical") {
    require(n_sim >= 8 && p_sim >= 1, "table: empirical engine needs n_sim/p_sim");
    require(norms == "true" || norms == "estimated", "table: norms must be true|estimated");
  } else {
    require(grid_g >= 1, "table: process engines need a grid");
  }
}

std::string TableKey::filename() const {
  std::ostringstream os;
  os << engine << "_q" << q << "_" << lane << "_T" << T << "_" << boundary;
  if (engine == "empirical")
    os << "_n" << n_sim << "_p" << p_sim << "_" << (norms == "estimated" ? "est" : "plug");
  else
    os << "_g" << grid_g;
  os << "_R" << replications << "_s" << seed << ".json";
  return os.str();
}

double critical_value_from_sample(const Vec& sorted_sample, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "critical_value: alpha outside (0,1)");
  const double r = static_cast<double>(sorted_sample.size());
  require(r * std::min(alpha, 1.0 - alpha) >= 50.0,
          "critical_value: too few replications for requested tail");
  return quantile_type7_sorted(sorted_sample, 1.0 - alpha);
}

double CriticalValueTable::critical_value(double alpha) const {
  return critical_value_from_sample(sample, alpha);
}

CriticalValueTable build_table(const TableKey& key, int threads) {
  key.validate();
  CriticalValueTable t;
  t.key = key;
  Vec sample;
  if (key.engine == "empirical") {
    PivotalSpec spec;
    spec.n_sim = key.n_sim;
    spec.p_sim = key.p_sim;
    spec.q = key.q;
    spec.T = key.T;
    spec.boundary = boundary_from_name(key.boundary);
    spec.R = key.replications;
    spec.seed = key.seed;
    spec.estimate_norms = key.norms == "estimated";
    sample = simulate_sup_pivotal(spec, threads);
  } else {
    GridSpec grid{key.T, key.grid_g};
    const auto boundary = boundary_from_name(key.boundary);
    if (key.engine == "gaussian" && key.lane == "uq") {
      sample = simulate_sup_gaussian_qc(key.q, grid, boundary, key.replications, key.seed);
    } else if (key.engine == "gaussian") {
      sample = simulate_sup_gaussian_q2(grid, boundary, key.replications, key.seed);
      for (double& v : sample) v /= std::sqrt(2.0);  // statistic scale of the l2 lane
    } else {  // brownian, q = 2
      sample = simulate_sup_brownian_q2(grid, boundary, key.replications, key.seed);
      if (key.lane == "l2")
        for (double& v : sample) v /= std::sqrt(2.0);
      else
        for (double& v : sample) v *= std::sqrt(2.0);
    }
  }
  std::sort(sample.begin(), sample.end());
  t.sample = std::move(sample);
  for (double a : {0.10, 0.05, 0.025, 0.01}) {
    if (static_cast<double>(t.sample.size()) * a >= 50.0) {
      std::ostringstream os;
      os << a;
      t.quantiles[os.str()] = critical_value_from_sample(t.sample, a);
    }
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  t.created = std::to_string(static_cast<long long>(now));
  return t;
}

namespace {

json key_to_json(const TableKey& k) {
  return json{{"engine", k.engine}, {"q", k.q},           {"lane", k.lane},
              {"T", k.T},           {"boundary", k.boundary}, {"grid_g", k.grid_g},
              {"n_sim", k.n_sim},   {"p_sim", k.p_sim},   {"norms", k.norms},
              {"replications", k.replications}, {"seed", k.seed}};
}

TableKey key_from_json(const json& j) {
  TableKey k;
  k.engine = j.at("engine").get<std::string>();
  k.q = j.at("q").get<int>();
  k.lane = j.at("lane").get<std::string>();
  k.T = j.at("T").get<double>();
  k.boundary = j.at("boundary").get<std::string>();
  k.grid_g = j.at("grid_g").get<int>();
  k.n_sim = j.at("n_sim").get<long>();
  k.p_sim = j.at("p_sim").get<int>();
  k.norms = j.value("norms", "true");
  k.replications = j.at("replications").get<long>();
  k.seed = j.at("seed").get<std::uint64_t>();
  return k;
}

}  // namespace

void save_table(const std::string& path, const CriticalValueTable& table) {
  json j;
  j["key"] = key_to_json(table.key);
  j["quantiles"] = table.quantiles;
  j["sample"] = table.sample;
  j["version"] = table.version;
  j["created"] = table.created;
  std::ofstream out(path);
  require(out.good(), "table: cannot open for write: " + path);
  out << j.dump();
  out.close();
  if (!out) throw std::runtime_error("table: write failed: " + path);
}

CriticalValueTable load_table(const std::string& path, const TableKey& want) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("table: cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("table: corrupt file " + path + ": " + e.what());
  }
  CriticalValueTable t;
  try {
    t.key = key_from_json(j.at("key"));
    t.quantiles = j.at("quantiles").get<std::map<std::string, double>>();
    t.sample = j.at("sample").get<Vec>();
    t.version = j.at("version").get<std::string>();
    t.created = j.value("created", "");
  } catch (const std::exception& e) {
    throw std::runtime_error("table: corrupt file " + path + ": " + e.what());
  }
  if (!(t.key == want)) throw std::runtime_error("table: key mismatch in " + path);
  if (t.version != kLibraryVersion)
    std::cerr << "warning: table " << path << " written by version " << t.version
              << ", current " << kLibraryVersion << "; key matches, accepting\n";
  return t;
}

CriticalValueTable get_or_build(const std::string& cache_dir, const TableKey& key, int threads) {
  key.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cache_dir);
  const auto path = (fs::path(cache_dir) / key.filename()).string();
  if (fs::exists(path)) return load_table(path, key);
  auto t = build_table(key, threads);
  save_table(path, t);
  return t;
}

TableKey default_key(const std::string& engine, int q, double T, BoundaryKind boundary,
                     long n, int p, std::uint64_t seed) {
  TableKey k;
  k.engine = engine;
  k.q = q;
  k.lane = q == 2 ? "l2" : "uq";
  k.T = T;
  k.boundary = boundary_name(boundary);
  if (engine == "empirical") {
    k.n_sim = n;
    k.p_sim = p;
    k.norms = "estimated";
    k.replications = q == 2 ? 20000 : 8000;
  } else {
    k.grid_g = q == 2 ? 32 : 24;
    k.replications = engine == "brownian" ? 200000 : 100000;
  }
  k.seed = seed;
  return k;
}

std::map<int, double> calibrate_thresholds(const MonitorConfig& cfg, const std::string& engine,
                                           const std::string& cache_dir, int threads) {
  cfg.validate();
  const double alpha_star =
      1.0 - std::pow(1.0 - cfg.alpha, 1.0 / static_cast<double>(cfg.q_set.size()));
  std::map<int, double> out;
  for (int q : cfg.q_set) {
    const auto key = default_key(engine, q, cfg.T, cfg.boundary, cfg.n, cfg.p, cfg.seed);
    const auto table = get_or_build(cache_dir, key, threads);
    out[q] = table.critical_value(alpha_star);
  }
  return out;
}

}  // namespace hdmon
