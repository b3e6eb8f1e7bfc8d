// Command-line front end: calibrate critical values, train phase-I estimates,
// monitor streams, and run size/power experiments.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hdmon/csv.hpp"
#include "hdmon/cvtable.hpp"
#include "hdmon/experiment.hpp"
#include "hdmon/monitor.hpp"

using namespace hdmon;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAlarm = 10;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string default_cache_dir() {
  if (const char* env = std::getenv("HDMON_CACHE_DIR")) return env;
  return "cv_cache";
}

std::vector<int> parse_q_list(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoi(s.substr(pos, comma - pos)));
    pos = comma + 1;
    if (comma == s.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

json norms_to_json(const NormEstimates& est, int p) {
  json j;
  j["n_train"] = est.n_train;
  j["p"] = p;
  j["frob_sq"] = est.frob_sq;
  json lq = json::object(), method = json::object();
  for (const auto& [q, v] : est.lq) lq[std::to_string(q)] = v;
  for (const auto& [q, m] : est.method) method[std::to_string(q)] = m;
  j["lq"] = lq;
  j["method"] = method;
  j["version"] = kLibraryVersion;
  return j;
}

NormEstimates norms_from_json(const json& j, int* p_out) {
  NormEstimates est;
  est.n_train = j.at("n_train").get<long>();
  est.frob_sq = j.at("frob_sq").get<double>();
  for (const auto& [k, v] : j.at("lq").items()) est.lq[std::stoi(k)] = v.get<double>();
  if (j.contains("method"))
    for (const auto& [k, v] : j.at("method").items())
      est.method[std::stoi(k)] = v.get<std::string>();
  if (p_out) *p_out = j.at("p").get<int>();
  return est;
}

int cmd_calibrate(const std::string& cache_dir, const std::string& engine,
                  const std::vector<int>& qs, double T, const std::string& boundary,
                  int grid, long reps, std::uint64_t seed, long n_sim, int p_sim) {
  namespace fs = std::filesystem;
  for (int q : qs) {
    TableKey key = default_key(engine, q, T, boundary_from_name(boundary), n_sim, p_sim, seed);
    if (grid > 0 && engine != "empirical") key.grid_g = grid;
    if (reps > 0) key.replications = reps;
    key.validate();
    const auto path = (fs::path(cache_dir) / key.filename()).string();
    const bool existed = fs::exists(path);
    const auto table = get_or_build(cache_dir, key, 0);
    std::cout << (existed ? "exists " : "wrote ") << path << "\n";
    for (const auto& [a, c] : table.quantiles)
      std::cout << "  alpha=" << a << "  c=" << c << "\n";
  }
  return kExitOk;
}

int cmd_train(const std::string& input, const std::string& output, const std::vector<int>& qs,
              long incomplete_n, std::uint64_t seed) {
  std::ifstream in(input);
  if (!in.good()) throw std::runtime_error("train: cannot open " + input);
  const auto rows = read_csv(in);
  if (rows.empty()) throw std::runtime_error("train: empty input");
  const long n = static_cast<long>(rows.size());
  const int max_q = *std::max_element(qs.begin(), qs.end());
  if (n < std::max<long>(4, 2L * max_q))
    throw std::runtime_error("train: n = " + std::to_string(n) + " too small (need >= " +
                             std::to_string(std::max<long>(4, 2L * max_q)) + ")");
  const auto est = estimate_norms(rows, qs, incomplete_n, seed);
  for (int q : qs) {
    const double v = q == 2 ? est.frob_sq : est.lq.at(q);
    if (!(v > 0.0))
      throw std::runtime_error("train: nonpositive norm estimate for q=" + std::to_string(q) +
                               "; enlarge the training sample or the tuple count");
  }
  std::ofstream out(output);
  if (!out.good()) throw std::runtime_error("train: cannot write " + output);
  out << norms_to_json(est, static_cast<int>(rows.front().size())).dump(2) << "\n";
  std::cout << "wrote " << output << " (n=" << n << ", p=" << rows.front().size() << ")\n";
  return kExitOk;
}

int cmd_monitor(const std::string& phase1_path, const std::string& estimates_path,
                const std::string& input, const std::string& output, double T, double alpha,
                const std::string& boundary, const std::vector<int>& qs,
                const std::string& cache_dir, const std::string& engine, std::uint64_t seed) {
  std::ifstream p1(phase1_path);
  if (!p1.good()) throw std::runtime_error("monitor: cannot open " + phase1_path);
  const auto phase1 = read_csv(p1);
  if (phase1.empty()) throw std::runtime_error("monitor: empty phase-I block");

  std::ifstream est_in(estimates_path);
  if (!est_in.good()) throw std::runtime_error("monitor: cannot open " + estimates_path);
  json est_json;
  est_in >> est_json;
  int est_p = 0;
  const auto norms = norms_from_json(est_json, &est_p);
  if (est_p != static_cast<int>(phase1.front().size()))
    throw std::runtime_error("monitor: estimates dimension does not match phase-I block");
  if (norms.n_train != static_cast<long>(phase1.size()))
    throw std::runtime_error("monitor: estimates trained on a different n");

  MonitorConfig cfg;
  cfg.n = static_cast<long>(phase1.size());
  cfg.p = static_cast<int>(phase1.front().size());
  cfg.q_set = qs;
  cfg.T = T;
  cfg.alpha = alpha;
  cfg.boundary = boundary_from_name(boundary);
  cfg.seed = seed;
  cfg.validate();
  for (int q : qs)
    if (q != 2 && norms.lq.find(q) == norms.lq.end())
      throw std::runtime_error("monitor: estimates file lacks q=" + std::to_string(q));

  const auto thresholds = calibrate_thresholds(cfg, engine, cache_dir);
  Monitor mon(cfg, norms, thresholds, phase1);

  std::ofstream log(output);
  if (!log.good()) throw std::runtime_error("monitor: cannot write " + output);

  std::ifstream file_in;
  std::istream* src = &std::cin;
  if (input != "-") {
    file_in.open(input);
    if (!file_in.good()) throw std::runtime_error("monitor: cannot open " + input);
    src = &file_in;
  }
  CsvReader reader(*src);
  Vec row;
  long k = cfg.n;
  bool alarmed = false;
  while (reader.next(row)) {
    ++k;
    if (static_cast<int>(row.size()) != cfg.p)
      throw std::runtime_error("monitor: row " + std::to_string(k) + " has " +
                               std::to_string(row.size()) + " columns, expected " +
                               std::to_string(cfg.p));
    const auto decision = mon.step({k, row});
    json rec;
    rec["k"] = k;
    json stats = json::object(), thr = json::object();
    for (const auto& [q, v] : mon.last().stats) stats[std::to_string(q)] = v;
    for (const auto& [q, v] : mon.last().thresholds) thr[std::to_string(q)] = v;
    rec["stats"] = stats;
    rec["thresholds"] = thr;
    rec["decision"] = decision == StepDecision::Alarm ? "alarm" : "continue";
    log << rec.dump() << "\n";
    log.flush();
    if (decision == StepDecision::Alarm) {
      alarmed = true;
      const auto& ev = mon.alarm();
      json fin;
      fin["event"] = "alarm";
      fin["k_alarm"] = ev.k_alarm;
      fin["triggered_q"] = ev.triggered_q;
      fin["trigger_q"] = ev.trigger_q;
      fin["m_hat"] = ev.m_hat;
      json locs = json::object();
      for (int q : qs)
        if (ev.k_alarm >= cfg.n + q + 1) locs[std::to_string(q)] = mon.locate_change(q);
      fin["m_hat_by_q"] = locs;
      log << fin.dump() << "\n";
      break;
    }
    if (k == cfg.horizon()) break;
  }
  if (!alarmed) {
    json fin;
    fin["event"] = k < cfg.horizon() ? "truncated" : "end";
    fin["k_last"] = k;
    log << fin.dump() << "\n";
  }
  std::cout << (alarmed ? "alarm" : "no alarm") << " (k_last=" << k << ")\n";
  return alarmed ? kExitAlarm : kExitOk;
}

int cmd_simulate(const ScenarioSpec& spec, const std::string& cache_dir,
                 const std::string& engine, long incomplete_n, int threads,
                 const std::string& output) {
  spec.validate();
  const auto thresholds =
      calibrate_thresholds(spec.monitor_config(), engine, cache_dir, threads);
  const auto rep = run_experiment(spec, thresholds, incomplete_n, threads);
  json j;
  j["spec"] = {{"n", spec.n},
               {"p", spec.p},
               {"T", spec.T},
               {"rho", spec.rho},
               {"delta", spec.delta},
               {"r", spec.r_sparsity},
               {"k_star", spec.delta > 0 ? json(spec.change_time()) : json(nullptr)},
               {"reps", spec.reps},
               {"alpha", spec.alpha},
               {"boundary", boundary_name(spec.boundary)},
               {"q_set", spec.q_set},
               {"seed", spec.seed}};
  json thr = json::object();
  for (const auto& [q, c] : thresholds) thr[std::to_string(q)] = c;
  j["thresholds"] = thr;
  j["engine"] = engine;
  j["reps_done"] = rep.reps_done;
  j["phase1_failures"] = rep.phase1_failures;
  j["reject_rate"] = rep.reject_rate;
  j["alarms"] = rep.alarms;
  j["alarms_post_change"] = rep.alarms_post;
  if (!std::isnan(rep.adt)) j["adt"] = rep.adt;
  json byq = json::object();
  for (const auto& [q, cnt] : rep.triggered_by_q) byq[std::to_string(q)] = cnt;
  j["triggered_by_q"] = byq;
  j["version"] = kLibraryVersion;
  std::ofstream out(output);
  if (!out.good()) throw std::runtime_error("simulate: cannot write " + output);
  out << j.dump(2) << "\n";
  std::cout << "reject_rate=" << rep.reject_rate;
  if (!std::isnan(rep.adt)) std::cout << " adt=" << rep.adt;
  std::cout << " (reps=" << rep.reps_done << ", failures=" << rep.phase1_failures << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential mean-shift monitoring for high-dimensional streams"};
  app.set_config("--config");
  app.require_subcommand(1);

  std::string cache_dir = default_cache_dir();
  std::string engine = "empirical";
  std::string boundary = "T2";
  std::string q_list = "2,6";
  double T = 2.0, alpha = 0.1;
  std::uint64_t seed = 0;
  app.add_option("--cache-dir", cache_dir, "critical value cache directory");

  auto* cal = app.add_subcommand("calibrate", "simulate and cache critical values");
  int cal_grid = 0;
  long cal_reps = 0, cal_nsim = 100;
  int cal_psim = 50;
  cal->add_option("--engine", engine, "empirical | gaussian | brownian");
  cal->add_option("--q", q_list, "comma-separated even orders");
  cal->add_option("--T", T, "horizon multiplier");
  cal->add_option("--boundary", boundary, "T1 | T2 | T3");
  cal->add_option("--grid", cal_grid, "grid points per unit (process engines)");
  cal->add_option("--reps", cal_reps, "simulation replications");
  cal->add_option("--seed", seed, "simulation seed");
  cal->add_option("--n-sim", cal_nsim, "empirical engine phase-I length");
  cal->add_option("--p-sim", cal_psim, "empirical engine dimension");

  auto* tr = app.add_subcommand("train", "estimate covariance norms from a phase-I CSV");
  std::string tr_in, tr_out = "estimates.json";
  long tr_incn = 0;
  tr->add_option("--input", tr_in, "phase-I CSV (rows = time)")->required();
  tr->add_option("--output", tr_out, "estimates file");
  tr->add_option("--q", q_list, "comma-separated even orders");
  tr->add_option("--incomplete-N", tr_incn, "tuples for the incomplete estimator (0 = 50n)");
  tr->add_option("--seed", seed, "sampling seed");

  auto* mo = app.add_subcommand("monitor", "monitor a stream against trained estimates");
  std::string mo_phase1, mo_est, mo_in = "-", mo_out = "events.jsonl";
  mo->add_option("--phase1", mo_phase1, "phase-I CSV")->required();
  mo->add_option("--estimates", mo_est, "estimates file from 'train'")->required();
  mo->add_option("--input", mo_in, "stream CSV or '-' for stdin");
  mo->add_option("--output", mo_out, "JSONL event log");
  mo->add_option("--T", T, "horizon multiplier");
  mo->add_option("--alpha", alpha, "global size");
  mo->add_option("--boundary", boundary, "T1 | T2 | T3");
  mo->add_option("--q", q_list, "comma-separated even orders");
  mo->add_option("--engine", engine, "calibration engine");
  mo->add_option("--seed", seed, "calibration seed");

  auto* si = app.add_subcommand("simulate", "size/power/ADT experiment");
  ScenarioSpec spec;
  long si_kstar = 0, si_incn = 0;
  int si_threads = 0;
  std::string si_out = "report.json";
  si->add_option("--n", spec.n, "phase-I length");
  si->add_option("--p", spec.p, "dimension");
  si->add_option("--T", spec.T, "horizon multiplier");
  si->add_option("--rho", spec.rho, "AR(1) coefficient");
  si->add_option("--delta", spec.delta, "total shift energy (0 = null)");
  si->add_option("--r", spec.r_sparsity, "number of shifted coordinates");
  si->add_option("--kstar", si_kstar, "change time (0 = floor(1.25n)+1)");
  si->add_option("--reps", spec.reps, "replications");
  si->add_option("--alpha", spec.alpha, "global size");
  si->add_option("--boundary", boundary, "T1 | T2 | T3");
  si->add_option("--q", q_list, "comma-separated even orders");
  si->add_option("--seed", spec.seed, "experiment seed");
  si->add_option("--engine", engine, "calibration engine");
  si->add_option("--threads", si_threads, "worker threads (0 = hardware)");
  si->add_option("--incomplete-N", si_incn, "tuples for the incomplete estimator");
  si->add_option("--output", si_out, "report file");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto qs = parse_q_list(q_list);
    if (cal->parsed())
      return cmd_calibrate(cache_dir, engine, qs, T, boundary, cal_grid, cal_reps, seed,
                           cal_nsim, cal_psim);
    if (tr->parsed()) return cmd_train(tr_in, tr_out, qs, tr_incn, seed);
    if (mo->parsed())
      return cmd_monitor(mo_phase1, mo_est, mo_in, mo_out, T, alpha, boundary, qs, cache_dir,
                         engine, seed);
    if (si->parsed()) {
      spec.q_set = qs;
      spec.boundary = boundary_from_name(boundary);
      if (si_kstar > 0) spec.k_star = si_kstar;
      return cmd_simulate(spec, cache_dir, engine, si_incn, si_threads, si_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
