#include "hdmon/gpsim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>

namespace hdmon {

namespace gp {

double interval_cov(double a1, double b1, double a2, double b2) {
  const double ov = std::min(b1, b2) - std::max(a1, a2);
  return ov >= 0.0 ? ov * ov : 0.0;
}

namespace {
double pow_or_zero(double base, int e) {
  if (e == 0) return 1.0;
  if (base <= 0.0) return 0.0;
  return std::pow(base, e);
}
}  // namespace

double qc_cov(int q, int c1, double s1, double t1, int c2, double s2, double t2) {
  if (s1 > s2 || (s1 == s2 && c1 > c2)) {
    std::swap(c1, c2);
    std::swap(s1, s2);
    std::swap(t1, t2);
  }
  if (c1 > c2) return 0.0;
  const double b = std::min(t1, t2);
  const double base2 = std::min(t1, s2) - s1;
  const double base3 = b - s2;
  const double coeff = binom_coeff(c2, c1) * factorial_d(c1) * factorial_d(q - c1);
  return coeff * pow_or_zero(s1, c1) * pow_or_zero(base2, c2 - c1) *
         pow_or_zero(base3, q - c2);
}

double var_g2(double s, double t) { return s * s * t * t * (t - s) * (t - s); }

double var_gq(int q, double s, double t) {
  return factorial_d(q) * std::pow(s * t * (t - s), q);
}

}  // namespace gp

namespace {

using Eigen::MatrixXd;

// Cholesky with escalating diagonal jitter. The analytic covariance is PSD;
// anything past 1e-10 indicates a wrong assembly, not conditioning.
MatrixXd factor_with_jitter(MatrixXd cov) {
  const double jitters[] = {0.0, 1e-12, 1e-11, 1e-10};
  for (double j : jitters) {
    MatrixXd c = cov;
    if (j > 0.0) c.diagonal().array() += j;
    Eigen::LLT<MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw std::runtime_error("gpsim: covariance factorization failed beyond jitter budget");
}

struct FieldSampler {
  MatrixXd al;        // (n_scan x d): field values = al * z
  Vec w;              // boundary weights per scan row
  long n_scan = 0;

  Vec run(long R, std::uint64_t seed) const {
    Vec out(R, 0.0);
    const long block = 8192;
    const long d = al.cols();
    long done = 0;
    std::uint64_t block_id = 0;
    while (done < R) {
      const long b = std::min(block, R - done);
      auto rng = rng_stream(seed, block_id++);
      std::normal_distribution<double> gauss(0.0, 1.0);
      MatrixXd z(d, b);
      for (long col = 0; col < b; ++col)
        for (long row = 0; row < d; ++row) z(row, col) = gauss(rng);
      MatrixXd field = al * z;  // n_scan x b
      for (long col = 0; col < b; ++col) {
        double sup = 0.0;  // the diagonal s = t contributes an exact zero
        for (long r = 0; r < n_scan; ++r) sup = std::max(sup, field(r, col) / w[r]);
        out[done + col] = sup;
      }
      done += b;
    }
    return out;
  }
};

}  // namespace

Vec simulate_sup_gaussian_q2(const GridSpec& grid, BoundaryKind boundary, long R,
                             std::uint64_t seed) {
  require(R >= 1, "gpsim: R must be positive");
  grid.validate();
  const auto pairs = grid.wedge_pairs();
  const int g = grid.g;
  // coordinate ids for intervals (a,b) in grid units, zero-length excluded
  std::map<std::pair<long, long>, long> ids;
  auto key = [&](double a, double b) {
    return std::make_pair(static_cast<long>(std::llround(a * g)),
                          static_cast<long>(std::llround(b * g)));
  };
  auto intern = [&](double a, double b) -> long {
    if (std::llround((b - a) * g) == 0) return -1;  // Q over a point is a.s. zero
    auto k = key(a, b);
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    const long id = static_cast<long>(ids.size());
    ids.emplace(k, id);
    return id;
  };
  struct Row {
    long i0s, ist, i0t;
    double c1, c2, c3, t;
  };
  std::vector<Row> rows;
  for (const auto& [s, t] : pairs) {
    if (s >= t) continue;  // field vanishes identically on the diagonal
    Row r;
    r.i0s = intern(0.0, s);
    r.ist = intern(s, t);
    r.i0t = intern(0.0, t);
    r.c1 = t * (t - s);
    r.c2 = s * t;
    r.c3 = -s * (t - s);
    r.t = t;
    rows.push_back(r);
  }
  const long d = static_cast<long>(ids.size());
  MatrixXd cov(d, d);
  std::vector<std::pair<double, double>> iv(d);
  for (const auto& [k, id] : ids)
    iv[id] = {static_cast<double>(k.first) / g, static_cast<double>(k.second) / g};
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j)
      cov(i, j) = gp::interval_cov(iv[i].first, iv[i].second, iv[j].first, iv[j].second);
  const MatrixXd L = factor_with_jitter(std::move(cov));

  FieldSampler sampler;
  sampler.n_scan = static_cast<long>(rows.size());
  sampler.al.resize(sampler.n_scan, d);
  sampler.al.setZero();
  sampler.w.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(d);
    if (rows[r].i0s >= 0) a(rows[r].i0s) += rows[r].c1;
    if (rows[r].ist >= 0) a(rows[r].ist) += rows[r].c2;
    if (rows[r].i0t >= 0) a(rows[r].i0t) += rows[r].c3;
    sampler.al.row(r) = a * L;
    sampler.w[r] = boundary_w(boundary, rows[r].t - 1.0);
  }
  return sampler.run(R, seed);
}

Vec simulate_sup_gaussian_qc(int q, const GridSpec& grid, BoundaryKind boundary, long R,
                             std::uint64_t seed) {
  require(q >= 2 && q % 2 == 0 && q <= 8, "gpsim: q must be even, 2..8");
  require(R >= 1, "gpsim: R must be positive");
  grid.validate();
  const auto pairs = grid.wedge_pairs();
  // coordinates (c, s, t) with positive variance, covariance pre-scaled by
  // 1/sqrt(q! 2^q) for conditioning; samples rescaled back on output.
  const double norm = std::sqrt(factorial_d(q) * std::pow(2.0, q));
  struct Coord {
    int c;
    double s, t;
  };
  std::vector<Coord> coords;
  std::vector<std::array<long, 9>> pair_coord_ids(pairs.size());
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto& [s, t] = pairs[j];
    for (int c = 0; c <= q; ++c) {
      const double var = gp::qc_cov(q, c, s, t, c, s, t);
      if (var > 0.0) {
        pair_coord_ids[j][c] = static_cast<long>(coords.size());
        coords.push_back({c, s, t});
      } else {
        pair_coord_ids[j][c] = -1;
      }
    }
  }
  const long d = static_cast<long>(coords.size());
  MatrixXd cov(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = i; j < d; ++j) {
      const double v = gp::qc_cov(q, coords[i].c, coords[i].s, coords[i].t, coords[j].c,
                                  coords[j].s, coords[j].t) /
                       (norm * norm);
      cov(i, j) = v;
      cov(j, i) = v;
    }
  const MatrixXd L = factor_with_jitter(std::move(cov));

  FieldSampler sampler;
  std::vector<std::size_t> scan_pairs;
  for (std::size_t j = 0; j < pairs.size(); ++j)
    if (pairs[j].first < pairs[j].second) scan_pairs.push_back(j);
  sampler.n_scan = static_cast<long>(scan_pairs.size());
  sampler.al.resize(sampler.n_scan, d);
  sampler.al.setZero();
  sampler.w.resize(scan_pairs.size());
  for (std::size_t r = 0; r < scan_pairs.size(); ++r) {
    const auto& [s, t] = pairs[scan_pairs[r]];
    Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(d);
    for (int c = 0; c <= q; ++c) {
      const long id = pair_coord_ids[scan_pairs[r]][c];
      if (id < 0) continue;
      const double sign = ((q - c) % 2 == 0) ? 1.0 : -1.0;
      a(id) = sign * binom_coeff(q, c) * std::pow(s, q - c) * std::pow(t - s, c);
    }
    sampler.al.row(r) = a * L;
    sampler.w[r] = boundary_w(boundary, t - 1.0);
  }
  Vec out = sampler.run(R, seed);
  for (double& v : out) v *= norm;  // back to the literal Theorem-3 scale
  return out;
}

Vec simulate_sup_brownian_q2(const GridSpec& grid, BoundaryKind boundary, long R,
                             std::uint64_t seed) {
  require(R >= 1, "gpsim: R must be positive");
  grid.validate();
  const int g = grid.g;
  const long nfull = static_cast<long>(std::llround(grid.T * g));  // steps on [0,T]
  const auto pairs = grid.wedge_pairs();
  struct Row {
    long is, it;
    double s, t, w;
  };
  std::vector<Row> rows;
  for (const auto& [s, t] : pairs) {
    if (s >= t) continue;
    rows.push_back({static_cast<long>(std::llround(s * g)), static_cast<long>(std::llround(t * g)),
                    s, t, boundary_w(boundary, t - 1.0)});
  }
  const double dt = 1.0 / g;
  const double sdt = std::sqrt(dt);
  Vec w_path(nfull + 1, 0.0);
  Vec out(R);
  const long block = 8192;
  long done = 0;
  std::uint64_t block_id = 0;
  while (done < R) {
    const long b = std::min(block, R - done);
    auto rng = rng_stream(seed, block_id++);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (long rep = 0; rep < b; ++rep) {
      for (long i = 1; i <= nfull; ++i) w_path[i] = w_path[i - 1] + sdt * gauss(rng);
      double sup = 0.0;
      for (const Row& r : rows) {
        const double ws = w_path[r.is];
        const double wt = w_path[r.it];
        const double q0s = (ws * ws - r.s) / std::sqrt(2.0);
        const double qst = ((wt - ws) * (wt - ws) - (r.t - r.s)) / std::sqrt(2.0);
        const double q0t = (wt * wt - r.t) / std::sqrt(2.0);
        const double gval =
            r.t * (r.t - r.s) * q0s + r.s * r.t * qst - r.s * (r.t - r.s) * q0t;
        sup = std::max(sup, gval / r.w);
      }
      out[done + rep] = sup;
    }
    done += b;
  }
  return out;
}

}  // namespace hdmon
