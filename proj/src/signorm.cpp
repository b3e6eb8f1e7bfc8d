#include "hdmon/signorm.hpp"

#include <cmath>

namespace hdmon {

namespace {

// Strictly-upper Gram matrix A[i][j] = X_i' X_j, 0-based storage.
std::vector<Vec> gram(const std::vector<Vec>& rows) {
  const std::size_t n = rows.size();
  const std::size_t p = rows.front().size();
  std::vector<Vec> a(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < p; ++l) acc += rows[i][l] * rows[j][l];
      a[i][j] = acc;
      a[j][i] = acc;
    }
  return a;
}

double comb2(double m) { return m * (m - 1.0) / 2.0; }

}  // namespace

double frob_sq_complete(const std::vector<Vec>& rows) {
  const long n = static_cast<long>(rows.size());
  require(n >= 4, "frob_sq_complete: n < 4");
  const auto a = gram(rows);

  // Positions below refer to the sorted quadruple w<x<y<z and the kernel
  //   [A_wy - A_wz - A_xy + A_xz]^2.
  double sq = 0.0;         // the four squared terms
  double c_ab = 0.0;       // A_wy A_wz   (shared w)
  double c_ac = 0.0;       // A_wy A_xy   (shared y)
  double c_ad = 0.0;       // A_wy A_xz   (interleaved)
  double c_bc = 0.0;       // A_wz A_xy   (nested)
  double c_bd = 0.0;       // A_wz A_xz   (shared z)
  double c_cd = 0.0;       // A_xy A_xz   (shared x)

  // squares, one pass over pairs (i<j), 1-based index arithmetic
  for (long i = 1; i <= n; ++i)
    for (long j = i + 1; j <= n; ++j) {
      const double v = a[i - 1][j - 1] * a[i - 1][j - 1];
      const double gap = static_cast<double>(j - i - 1);
      sq += v * (gap * (n - j)                              // (w,y): x in (i,j), z > j
                 + comb2(gap)                               // (w,z): x<y inside
                 + static_cast<double>(i - 1) * (n - j)     // (x,y): w < i, z > j
                 + static_cast<double>(i - 1) * gap);       // (x,z): w < i, y inside
    }

  // shared-w: sum_w sum_{y<z>w} A_wy A_wz (y-w-1)
  for (long w = 1; w <= n; ++w) {
    double suffix = 0.0;  // sum_{z>y} A_wz, built descending in y
    for (long y = n; y > w; --y) {
      c_ab += a[w - 1][y - 1] * static_cast<double>(y - w - 1) * suffix;
      suffix += a[w - 1][y - 1];
    }
  }
  // shared-y: (n-y) * sum_{w<x<y} A_wy A_xy
  for (long y = 1; y <= n; ++y) {
    double s1 = 0.0, s2 = 0.0;
    for (long u = 1; u < y; ++u) {
      s1 += a[u - 1][y - 1];
      s2 += a[u - 1][y - 1] * a[u - 1][y - 1];
    }
    c_ac += static_cast<double>(n - y) * 0.5 * (s1 * s1 - s2);
  }
  // shared-z: sum_z sum_{w<x<z} A_wz A_xz (z-x-1)
  for (long z = 1; z <= n; ++z) {
    double prefix = 0.0;
    for (long x = 1; x < z; ++x) {
      c_bd += a[x - 1][z - 1] * static_cast<double>(z - x - 1) * prefix;
      prefix += a[x - 1][z - 1];
    }
  }
  // shared-x: (x-1) * sum_{x<y<z} A_xy A_xz
  for (long x = 1; x <= n; ++x) {
    double s1 = 0.0, s2 = 0.0;
    for (long v = x + 1; v <= n; ++v) {
      s1 += a[x - 1][v - 1];
      s2 += a[x - 1][v - 1] * a[x - 1][v - 1];
    }
    c_cd += static_cast<double>(x - 1) * 0.5 * (s1 * s1 - s2);
  }
  // interleaved (w,y)(x,z), w<x<y<z: sum over x<y of colprefix * rowsuffix
  {
    // colprefix[y][m] = sum_{u<=m} A_uy ; rowsuffix[x][m] = sum_{v>=m} A_xv
    std::vector<Vec> colpre(n + 1, Vec(n + 1, 0.0));
    std::vector<Vec> rowsuf(n + 1, Vec(n + 2, 0.0));
    for (long y = 1; y <= n; ++y)
      for (long u = 1; u <= n; ++u)
        colpre[y][u] = colpre[y][u - 1] + (u < y ? a[u - 1][y - 1] : 0.0);
    for (long x = 1; x <= n; ++x)
      for (long v = n; v >= 1; --v)
        rowsuf[x][v] = rowsuf[x][v + 1] + (v > x ? a[x - 1][v - 1] : 0.0);
    for (long x = 1; x <= n; ++x)
      for (long y = x + 1; y <= n; ++y)
        c_ad += colpre[y][x - 1] * rowsuf[x][y + 1];
    // nested (w,z)(x,y): A_xy * rect{u<x, v>y} A_uv
    std::vector<Vec> rect(n + 2, Vec(n + 2, 0.0));
    for (long u = n; u >= 1; --u)
      for (long v = n; v >= 1; --v)
        rect[u][v] = (v > u ? a[u - 1][v - 1] : 0.0) + rect[u + 1][v] + rect[u][v + 1] -
                     rect[u + 1][v + 1];
    auto rect_sum = [&](long umax, long vmin) {  // sum over u<=umax, v>=vmin of A_uv (u<v)
      if (umax < 1 || vmin > n) return 0.0;
      return rect[1][vmin] - rect[umax + 1][vmin];
    };
    for (long x = 1; x <= n; ++x)
      for (long y = x + 1; y <= n; ++y)
        c_bc += a[x - 1][y - 1] * rect_sum(x - 1, y + 1);
  }

  const double total = sq + 2.0 * (-c_ab - c_ac + c_ad + c_bc - c_bd - c_cd);
  const double denom =
      4.0 * (static_cast<double>(n) * (n - 1.0) * (n - 2.0) * (n - 3.0) / 24.0);
  return total / denom;
}

namespace {

double tuple_kernel(const std::vector<Vec>& rows, const std::vector<long>& idx, int q) {
  // idx holds i1<..<iq<j1<..<jq (1-based); kernel = (sum_l prod_k d_k(l))^2
  const std::size_t p = rows.front().size();
  double acc = 0.0;
  for (std::size_t l = 0; l < p; ++l) {
    double prod = 1.0;
    for (int k = 0; k < q; ++k)
      prod *= rows[idx[k] - 1][l] - rows[idx[k + q] - 1][l];
    acc += prod;
  }
  return acc * acc;
}

}  // namespace

double lq_norm_incomplete(const std::vector<Vec>& rows, int q, long n_samples,
                          std::uint64_t seed) {
  const long n = static_cast<long>(rows.size());
  require(q >= 2 && q % 2 == 0, "lq_norm_incomplete: q must be even");
  require(n >= 2L * q, "lq_norm_incomplete: n < 2q");
  require(n_samples >= 1, "lq_norm_incomplete: N must be >= 1");
  std::vector<long> idx(2 * q);
  double total = 0.0;
  for (long s = 0; s < n_samples; ++s) {
    auto rng = rng_stream(seed, static_cast<std::uint64_t>(s));
    // draw 2q distinct indices without replacement, sort ascending
    std::uniform_int_distribution<long> uni(1, n);
    int filled = 0;
    while (filled < 2 * q) {
      const long cand = uni(rng);
      bool dup = false;
      for (int i = 0; i < filled; ++i)
        if (idx[i] == cand) { dup = true; break; }
      if (!dup) idx[filled++] = cand;
    }
    std::sort(idx.begin(), idx.end());
    total += tuple_kernel(rows, idx, q);
  }
  return total / (std::pow(2.0, q) * static_cast<double>(n_samples));
}

double lq_norm_bruteforce(const std::vector<Vec>& rows, int q) {
  const long n = static_cast<long>(rows.size());
  require(q >= 2 && q % 2 == 0, "lq_norm_bruteforce: q must be even");
  require(n >= 2L * q, "lq_norm_bruteforce: n < 2q");
  double combos = 1.0;
  for (int i = 0; i < 2 * q; ++i) combos = combos * (n - i) / (i + 1);
  require(combos <= 1e6, "lq_norm_bruteforce: instance too large");
  std::vector<long> idx(2 * q);
  for (int i = 0; i < 2 * q; ++i) idx[i] = i + 1;
  double total = 0.0;
  long count = 0;
  while (true) {
    total += tuple_kernel(rows, idx, q);
    ++count;
    int pos = 2 * q - 1;
    while (pos >= 0 && idx[pos] == n - (2 * q - 1 - pos)) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < 2 * q; ++i) idx[i] = idx[i - 1] + 1;
  }
  return total / (std::pow(2.0, q) * static_cast<double>(count));
}

NormEstimates estimate_norms(const std::vector<Vec>& rows, const std::vector<int>& q_set,
                             long n_samples, std::uint64_t seed) {
  const long n = static_cast<long>(rows.size());
  require(n >= 4, "estimate_norms: n < 4");
  NormEstimates est;
  est.n_train = n;
  est.frob_sq = frob_sq_complete(rows);
  for (int q : q_set) {
    require(n >= 2L * q, "estimate_norms: n < 2q");
    if (q == 2) {
      est.lq[2] = est.frob_sq;
      est.method[2] = "complete";
    } else {
      const long ns = n_samples > 0 ? n_samples : 50L * n;
      est.lq[q] = lq_norm_incomplete(rows, q, ns, seed);
      est.method[q] =
          "incomplete(N=" + std::to_string(ns) + ",seed=" + std::to_string(seed) + ")";
    }
  }
  return est;
}

}  // namespace hdmon
