#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "hdmon/cvtable.hpp"
#include "hdmon/gpsim.hpp"

using namespace hdmon;

TEST_CASE("boundary functions") {
  CHECK(boundary_w(BoundaryKind::T1, 0.0) == 1.0);
  CHECK(boundary_w(BoundaryKind::T1, 7.3) == 1.0);
  CHECK(boundary_w(BoundaryKind::T2, 1.0) == doctest::Approx(4.0));
  CHECK(boundary_w(BoundaryKind::T3, 1.0) == doctest::Approx(4.0 * std::sqrt(0.5)));
  CHECK_THROWS_AS(boundary_w(BoundaryKind::T2, -0.1), std::invalid_argument);
  // pointwise dominance w_T3 <= w_T2
  for (double t = 0.0; t <= 3.0; t += 0.05)
    CHECK(boundary_w(BoundaryKind::T3, t) <= boundary_w(BoundaryKind::T2, t) + 1e-15);
}

TEST_CASE("grid includes endpoints exactly") {
  GridSpec grid{2.0, 8};
  const auto tg = grid.t_grid();
  CHECK(tg.front() == 1.0);
  CHECK(tg.back() == 2.0);
  CHECK(tg.size() == 9);
  const auto pairs = grid.wedge_pairs();
  CHECK(pairs.size() == 45);
  GridSpec bad{2.0, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("type-7 quantile on 1..100") {
  Vec x(100);
  for (int i = 0; i < 100; ++i) x[i] = i + 1.0;
  CHECK(critical_value_from_sample(x, 0.5) == doctest::Approx(50.5));
  CHECK_THROWS_AS(critical_value_from_sample(x, 0.01), std::invalid_argument);  // tail too thin
}

TEST_CASE("interval covariance spot values") {
  CHECK(gp::interval_cov(0, 1, 0, 1) == doctest::Approx(1.0));
  CHECK(gp::interval_cov(0, 1, 0, 2) == doctest::Approx(1.0));
  CHECK(gp::interval_cov(0, 0.5, 0.6, 1.0) == 0.0);  // disjoint
  CHECK(gp::interval_cov(0, 2, 0, 2) == doctest::Approx(4.0));
  CHECK(gp::interval_cov(1, 2, 0, 2) == doctest::Approx(1.0));
}

TEST_CASE("qc covariance: variances and alignment rules") {
  // Var Q_{q,c}(s;[0,t]) = c!(q-c)! s^c (t-s)^{q-c}
  CHECK(gp::qc_cov(6, 2, 1.5, 2.0, 2, 1.5, 2.0) ==
        doctest::Approx(2.0 * 24.0 * std::pow(1.5, 2) * std::pow(0.5, 4)));
  // equal s, different c: zero
  CHECK(gp::qc_cov(4, 1, 1.5, 2.0, 3, 1.5, 2.0) == 0.0);
  // smaller-s point must carry the smaller c
  CHECK(gp::qc_cov(4, 3, 1.2, 1.6, 1, 1.8, 2.0) == 0.0);
  // post-block of the larger-s point lies beyond the smaller horizon: zero
  CHECK(gp::qc_cov(4, 1, 1.2, 1.6, 3, 1.8, 2.0) == 0.0);
  // all-pre larger-s point: only the capped middle block contributes
  CHECK(gp::qc_cov(4, 1, 1.2, 1.6, 4, 1.8, 2.0) ==
        doctest::Approx(binom_coeff(4, 1) * 1.0 * 6.0 * 1.2 *
                        std::pow(std::min(1.6, 1.8) - 1.2, 3)));
  // horizon capping: the middle block stops at the smaller-s horizon
  CHECK(gp::qc_cov(2, 1, 1.2, 1.4, 2, 1.8, 2.0) ==
        doctest::Approx(2.0 * 1.2 * (1.4 - 1.2)));
  // symmetric in its arguments
  CHECK(gp::qc_cov(6, 1, 1.25, 1.75, 3, 1.5, 2.0) ==
        doctest::Approx(gp::qc_cov(6, 3, 1.5, 2.0, 1, 1.25, 1.75)));
}

TEST_CASE("field variance assembles from coordinate covariances") {
  // Var G_q(s,t) = q! (s t (t-s))^q must equal the assembled quadratic form
  for (int q : {2, 6}) {
    for (auto [s, t] : {std::pair{1.0, 2.0}, {1.25, 1.75}, {1.5, 2.0}}) {
      double var = 0.0;
      for (int c1 = 0; c1 <= q; ++c1)
        for (int c2 = 0; c2 <= q; ++c2) {
          const double a1 = ((q - c1) % 2 ? -1.0 : 1.0) * binom_coeff(q, c1) *
                            std::pow(s, q - c1) * std::pow(t - s, c1);
          const double a2 = ((q - c2) % 2 ? -1.0 : 1.0) * binom_coeff(q, c2) *
                            std::pow(s, q - c2) * std::pow(t - s, c2);
          var += a1 * a2 * gp::qc_cov(q, c1, s, t, c2, s, t);
        }
      CHECK(var == doctest::Approx(gp::var_gq(q, s, t)).epsilon(1e-9));
    }
  }
  // and the q = 2 interval representation gives half of Var G_2
  for (auto [s, t] : {std::pair{1.0, 2.0}, {1.3, 1.9}}) {
    const double c1 = t * (t - s), c2 = s * t, c3 = -s * (t - s);
    double var = c1 * c1 * gp::interval_cov(0, s, 0, s) +
                 c2 * c2 * gp::interval_cov(s, t, s, t) +
                 c3 * c3 * gp::interval_cov(0, t, 0, t) +
                 2 * c1 * c2 * gp::interval_cov(0, s, s, t) +
                 2 * c1 * c3 * gp::interval_cov(0, s, 0, t) +
                 2 * c2 * c3 * gp::interval_cov(s, t, 0, t);
    CHECK(var == doctest::Approx(gp::var_g2(s, t)).epsilon(1e-12));
    CHECK(2.0 * var == doctest::Approx(gp::var_gq(2, s, t)).epsilon(1e-12));
  }
}

TEST_CASE("sampled coordinate covariances match analytic values") {
  // six-coordinate spot set for q = 6 including non-overlapping geometry
  struct P {
    int c;
    double s, t;
  };
  const std::vector<P> pts{{0, 1.0, 2.0}, {3, 1.0, 2.0}, {6, 1.0, 2.0},
                           {2, 1.5, 2.0}, {1, 1.25, 1.5}, {5, 1.75, 2.0}};
  const int q = 6, d = 6;
  Eigen::MatrixXd cov(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      cov(i, j) = gp::qc_cov(q, pts[i].c, pts[i].s, pts[i].t, pts[j].c, pts[j].s, pts[j].t);
  Eigen::LLT<Eigen::MatrixXd> llt(cov +
                                  1e-12 * Eigen::MatrixXd::Identity(d, d));
  REQUIRE(llt.info() == Eigen::Success);
  Eigen::MatrixXd L = llt.matrixL();
  const long R = 60000;
  auto rng = rng_stream(4, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd z(d), v(d);
  for (long r = 0; r < R; ++r) {
    for (int i = 0; i < d; ++i) z(i) = gauss(rng);
    v = L * z;
    sum += v * v.transpose();
  }
  const Eigen::MatrixXd emp = sum / static_cast<double>(R);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double se =
          std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / static_cast<double>(R));
      CHECK(std::abs(emp(i, j) - cov(i, j)) < 4.0 * se + 1e-9);
    }
}

TEST_CASE("gaussian q2 engine runs and is deterministic") {
  GridSpec grid{2.0, 8};
  const auto a = simulate_sup_gaussian_q2(grid, BoundaryKind::T1, 2000, 11);
  const auto b = simulate_sup_gaussian_q2(grid, BoundaryKind::T1, 2000, 11);
  CHECK(a == b);
  for (double v : a) CHECK(v >= 0.0);
  // pointwise lower bound: sup >= value at (1,2) whose sd is 2
  const double q95 = quantile_type7(a, 0.95);
  CHECK(q95 > 2.0);
  CHECK(q95 < 8.0);
}

TEST_CASE("qc engine at q=2 matches the interval engine after the sqrt(2) bridge") {
  GridSpec grid{2.0, 16};
  const long R = 40000;
  auto a = simulate_sup_gaussian_q2(grid, BoundaryKind::T1, R, 21);
  auto b = simulate_sup_gaussian_qc(2, grid, BoundaryKind::T1, R, 22);
  // G_2 = sqrt(2) G as processes: quantiles must agree after rescaling
  for (double alpha : {0.10, 0.05}) {
    const double qa = quantile_type7(a, 1.0 - alpha) * std::sqrt(2.0);
    const double qb = quantile_type7(b, 1.0 - alpha);
    // combined MC error at these tails is ~1.5% of the value
    CHECK(qa == doctest::Approx(qb).epsilon(0.04));
  }
}

TEST_CASE("gaussian q6 engine is PSD within the jitter budget") {
  GridSpec grid{2.0, 8};
  CHECK_NOTHROW(simulate_sup_gaussian_qc(6, grid, BoundaryKind::T1, 50, 3));
}

TEST_CASE("grid refinement: sup quantiles converge as the grid doubles") {
  // The sup quantile carries a grid bias of order 1/sqrt(g) (the field
  // decorrelates linearly in the spacing), so successive doublings must
  // shrink the shift and the residual must be small against the quantile.
  const long R = 30000;
  const auto g16 = simulate_sup_gaussian_q2({2.0, 16}, BoundaryKind::T1, R, 99);
  const auto g32 = simulate_sup_gaussian_q2({2.0, 32}, BoundaryKind::T1, R, 99);
  const auto g64 = simulate_sup_gaussian_q2({2.0, 64}, BoundaryKind::T1, R, 99);
  const double q16 = quantile_type7(g16, 0.90);
  const double q32 = quantile_type7(g32, 0.90);
  const double q64 = quantile_type7(g64, 0.90);
  CHECK(std::abs(q64 - q32) < 0.9 * std::abs(q32 - q16));
  CHECK(std::abs(q64 - q32) < 0.05 * q64);
}

TEST_CASE("brownian representation engine: chi-square corner marginal") {
  GridSpec grid{2.0, 16};
  const long R = 60000;
  const auto sup = simulate_sup_brownian_q2(grid, BoundaryKind::T1, R, 41);
  // sup dominates the corner value sqrt(2)(chi2_1 - 1): its 95% quantile
  // is sqrt(2)*(3.8415-1) = 4.018, so q95(sup) must exceed it
  CHECK(quantile_type7(sup, 0.95) > 4.0);
  const auto again = simulate_sup_brownian_q2(grid, BoundaryKind::T1, R, 41);
  CHECK(sup == again);
}

TEST_CASE("critical values are monotone in alpha") {
  GridSpec grid{2.0, 8};
  auto s = simulate_sup_gaussian_q2(grid, BoundaryKind::T2, 5000, 51);
  std::sort(s.begin(), s.end());
  const double c10 = critical_value_from_sample(s, 0.10);
  const double c05 = critical_value_from_sample(s, 0.05);
  const double c01 = critical_value_from_sample(s, 0.01);
  CHECK(c10 <= c05);
  CHECK(c05 <= c01);
}

TEST_CASE("table cache round-trip, key mismatch, version policy") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "hdmon_cvtest";
  fs::remove_all(dir);
  TableKey key;
  key.engine = "gaussian";
  key.q = 2;
  key.lane = "l2";
  key.T = 2.0;
  key.boundary = "T2";
  key.grid_g = 8;
  key.replications = 2000;
  key.seed = 9;
  const auto t1 = get_or_build(dir.string(), key, 1);
  const auto t2 = get_or_build(dir.string(), key, 1);  // loads from disk
  CHECK(t1.sample == t2.sample);
  CHECK(t1.quantiles == t2.quantiles);

  TableKey other = key;
  other.grid_g = 16;
  CHECK_THROWS_AS(load_table((dir / key.filename()).string(), other), std::runtime_error);

  // version mismatch: accepted with a warning when the key matches
  auto t3 = t1;
  t3.version = "0.0.0-test";
  const auto vpath = (dir / "versioned.json").string();
  save_table(vpath, t3);
  CHECK_NOTHROW(load_table(vpath, key));

  // corrupt file
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{ not json";
  }
  CHECK_THROWS_AS(load_table((dir / "bad.json").string(), key), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("build_table produces identical tables for identical keys") {
  TableKey key;
  key.engine = "empirical";
  key.q = 2;
  key.lane = "l2";
  key.T = 2.0;
  key.boundary = "T1";
  key.n_sim = 30;
  key.p_sim = 3;
  key.replications = 600;
  key.seed = 77;
  const auto a = build_table(key, 1);
  const auto b = build_table(key, 4);  // thread count must not matter
  CHECK(a.sample == b.sample);
}
