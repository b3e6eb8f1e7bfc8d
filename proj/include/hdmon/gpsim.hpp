#pragma once

#include "hdmon/gridspec.hpp"

namespace hdmon {

// Analytic covariances of the limiting processes.
namespace gp {

// Cov(Q(a1,b1), Q(a2,b2)) = (min(b)-max(a))^2 on overlap, else 0.
double interval_cov(double a1, double b1, double a2, double b2);

// Cov(Q_{q,c1}(s1;[0,t1]), Q_{q,c2}(s2;[0,t2])). Ordered-tuple normalization.
// Writing (r,c_r,t_r) for the smaller-s coordinate and (R,c_R) for the larger:
// zero unless c_r <= c_R; otherwise
//   C(c_R,c_r) c_r! (q-c_r)! r^{c_r} (min(t_r,R)-r)^{c_R-c_r} (min(t1,t2)-R)^{q-c_R}
// with base^0 = 1 and zero whenever a positive exponent sees a negative base.
double qc_cov(int q, int c1, double s1, double t1, int c2, double s2, double t2);

// Pointwise field variances (used for diagnostics and tests).
double var_g2(double s, double t);              // Var G(s,t) = s^2 t^2 (t-s)^2
double var_gq(int q, double s, double t);       // Var G_q(s,t) = q! (s t (t-s))^q

}  // namespace gp

// Monte-Carlo samples of sup over the wedge of FIELD(s,t)/w(t-1).
//
// simulate_sup_gaussian_q2: the Gaussian field
//   G(s,t) = t(t-s) Q(0,s) + s t Q(s,t) - s(t-s) Q(0,t)
// sampled jointly from the analytic covariance via a Cholesky factorization
// (diagonal jitter escalates 1e-12 -> 1e-10, then errors out).
Vec simulate_sup_gaussian_q2(const GridSpec& grid, BoundaryKind boundary, long R,
                             std::uint64_t seed);

// simulate_sup_gaussian_qc: the general even-q Gaussian field
//   G_q(s,t) = sum_c (-1)^{q-c} C(q,c) s^{q-c} (t-s)^c Q_{q,c}(s;[0,t]).
Vec simulate_sup_gaussian_qc(int q, const GridSpec& grid, BoundaryKind boundary, long R,
                             std::uint64_t seed);

// simulate_sup_brownian_q2: same covariance structure realized through a
// single Brownian path, Q(a,b) = ((W_b-W_a)^2 - (b-a))/sqrt(2). Chi-square
// type marginals; the single-stream (p = 1) analog of the monitor statistic.
Vec simulate_sup_brownian_q2(const GridSpec& grid, BoundaryKind boundary, long R,
                             std::uint64_t seed);

}  // namespace hdmon
