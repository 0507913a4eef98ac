#pragma once

// Direct solver for the box-constrained subproblem
//
//   minimize f(x) = (1/2)(1'x)^2 - c'x   subject to 0 <= x <= u.
//
// Coordinates with c_i <= 0 or u_i = 0 are fixed at zero. The rest are
// sorted by non-increasing cost; with U_k the prefix sums of the sorted
// bounds, the merit values
//
//   G_k = U_{k-1} + u_k / 2 - c_k
//
// are strictly increasing, and the least index nbar with G_nbar >= 0 pins the
// optimum down to one of two candidate points, each a full prefix of bounds
// plus at most one fractional coordinate.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "rqkp/common.hpp"

namespace rqkp {

inline double f_eval(const std::vector<double>& x,
                     const std::vector<double>& c) {
  const double s = vec_sum(x);
  return 0.5 * s * s - dot(c, x);
}

// Sorted view of the active coordinates (c_i > 0, u_i > 0), costs
// non-increasing, ties by ascending original index. prefix_u[k] and
// prefix_cu[k] hold sums over the first k sorted entries.
struct SortedView {
  std::vector<int> order;  // sorted position -> original index
  std::vector<double> c;
  std::vector<double> u;
  std::vector<double> prefix_u;   // size m+1, prefix_u[0] = 0
  std::vector<double> prefix_cu;  // size m+1
  int m = 0;
};

inline SortedView build_sorted_view(const std::vector<double>& c,
                                    const std::vector<double>& u) {
  SortedView v;
  const int n = static_cast<int>(c.size());
  v.order.reserve(n);
  for (int i = 0; i < n; ++i)
    if (c[i] > 0.0 && u[i] > 0.0) v.order.push_back(i);
  std::sort(v.order.begin(), v.order.end(), [&](int i, int j) {
    if (c[i] != c[j]) return c[i] > c[j];
    return i < j;
  });
  v.m = static_cast<int>(v.order.size());
  v.c.resize(v.m);
  v.u.resize(v.m);
  v.prefix_u.resize(v.m + 1);
  v.prefix_cu.resize(v.m + 1);
  v.prefix_u[0] = v.prefix_cu[0] = 0.0;
  for (int k = 0; k < v.m; ++k) {
    v.c[k] = c[v.order[k]];
    v.u[k] = u[v.order[k]];
    v.prefix_u[k + 1] = v.prefix_u[k] + v.u[k];
    v.prefix_cu[k + 1] = v.prefix_cu[k] + v.c[k] * v.u[k];
  }
  return v;
}

/// Merit values of the sorted view; strictly increasing whenever the view is
/// validly sorted with positive bounds.
inline std::vector<double> compute_G(const SortedView& v) {
  std::vector<double> g(v.m);
  for (int k = 0; k < v.m; ++k)
    g[k] = v.prefix_u[k] + 0.5 * v.u[k] - v.c[k];
  return g;
}

/// Least 1-based index with G >= 0, or nullopt when every entry is negative.
inline std::optional<int> find_nbar(const std::vector<double>& G) {
  auto it = std::lower_bound(G.begin(), G.end(), 0.0);
  if (it == G.end()) return std::nullopt;
  return static_cast<int>(it - G.begin()) + 1;
}

enum class Candidate { XBAR, XTILDE };

// Normal form of the solution: `prefix_len` sorted coordinates at their
// bounds plus at most one fractional coordinate. Candidate values for both
// competing points are kept for diagnostics.
struct CoreResult {
  double objective = 0.0;
  int nbar_pos = 0;  // 0-based first non-negative merit, == m when none
  double delta1 = 0.0, delta2 = 0.0;
  Candidate winner = Candidate::XTILDE;
  double f_xbar = 0.0, f_xtilde = 0.0;
  int prefix_len = 0;
  int frac_pos = -1;  // sorted position of the fractional coordinate
  double frac_val = 0.0;
};

namespace detail {

// Value of a candidate "prefix of p bounds plus t on sorted coordinate p".
inline double prefix_plus(const SortedView& v, int p, double t) {
  const double s = v.prefix_u[p] + t;
  return 0.5 * s * s - (v.prefix_cu[p] + (p < v.m ? t * v.c[p] : 0.0));
}

}  // namespace detail

/// Solve over a prepared sorted view. The merit sign test uses a small
/// cost-relative slack; the two candidate evaluations make the choice
/// self-correcting near the boundary.
inline CoreResult solve_core(const SortedView& v) {
  CoreResult r;
  const int m = v.m;
  if (m == 0) return r;

  // Binary search for the first non-negative merit value.
  int lo = 0, hi = m;  // first k in [0, m] with G_k >= -tol, m if none
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    const double g = v.prefix_u[mid] + 0.5 * v.u[mid] - v.c[mid];
    if (g >= -1e-12 * (1.0 + std::fabs(v.c[mid])))
      hi = mid;
    else
      lo = mid + 1;
  }
  r.nbar_pos = lo;

  if (lo == m) {
    // Every merit value negative: the last coordinate absorbs what it can.
    const double dp = std::min(v.c[m - 1] - v.prefix_u[m - 1], v.u[m - 1]);
    r.delta2 = dp;
    r.f_xtilde = detail::prefix_plus(v, m - 1, dp);
    r.f_xbar = r.f_xtilde;
    r.objective = r.f_xtilde;
    r.winner = Candidate::XTILDE;
    if (dp < v.u[m - 1]) {
      r.prefix_len = m - 1;
      r.frac_pos = m - 1;
      r.frac_val = dp;
    } else {
      r.prefix_len = m;
    }
    return r;
  }

  if (lo == 0) {
    // nbar == 1: a single partially filled coordinate.
    const double d = std::min(v.c[0], v.u[0]);
    r.delta2 = d;
    r.f_xtilde = detail::prefix_plus(v, 0, d);
    r.f_xbar = 0.0;  // the empty point
    r.objective = r.f_xtilde;
    r.winner = Candidate::XTILDE;
    if (d < v.u[0]) {
      r.prefix_len = 0;
      r.frac_pos = 0;
      r.frac_val = d;
    } else {
      r.prefix_len = 1;
    }
    return r;
  }

  // 2 <= nbar <= m: two candidates around the crossover.
  const int nb = lo;  // 0-based position of nbar
  const double d1 = std::min(v.c[nb - 1] - v.prefix_u[nb - 1], v.u[nb - 1]);
  const double d2 = std::max(v.c[nb] - v.prefix_u[nb], 0.0);
  r.delta1 = d1;
  r.delta2 = d2;
  r.f_xbar = detail::prefix_plus(v, nb - 1, d1);
  r.f_xtilde = detail::prefix_plus(v, nb, d2);
  if (r.f_xtilde <= r.f_xbar) {
    r.winner = Candidate::XTILDE;
    r.objective = r.f_xtilde;
    if (d2 > 0.0) {
      r.prefix_len = nb;
      r.frac_pos = nb;
      r.frac_val = d2;
    } else {
      r.prefix_len = nb;
    }
  } else {
    r.winner = Candidate::XBAR;
    r.objective = r.f_xbar;
    if (d1 < v.u[nb - 1]) {
      r.prefix_len = nb - 1;
      r.frac_pos = nb - 1;
      r.frac_val = d1;
    } else {
      r.prefix_len = nb;
    }
  }
  return r;
}

inline std::vector<double> materialize(const SortedView& v, const CoreResult& r,
                                       int n) {
  std::vector<double> x(n, 0.0);
  for (int k = 0; k < r.prefix_len; ++k) x[v.order[k]] = v.u[k];
  if (r.frac_pos >= 0) x[v.order[r.frac_pos]] = r.frac_val;
  return x;
}

struct BoundedSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::optional<int> nbar;  // 1-based within the sorted active set
  double delta1 = 0.0;      // lift of coordinate nbar-1 (zero when unused)
  double delta2 = 0.0;      // lift of coordinate nbar, or the single/last lift
  Candidate candidate = Candidate::XTILDE;
  double f_xbar = 0.0, f_xtilde = 0.0;
};

inline BoundedSolution solve_bounded(const std::vector<double>& c,
                                     const std::vector<double>& u) {
  const SortedView v = build_sorted_view(c, u);
  const CoreResult core = solve_core(v);
  BoundedSolution s;
  s.x = materialize(v, core, static_cast<int>(c.size()));
  s.objective = core.objective;
  if (core.nbar_pos < v.m) s.nbar = core.nbar_pos + 1;
  s.delta1 = core.delta1;
  s.delta2 = core.delta2;
  s.candidate = core.winner;
  s.f_xbar = core.f_xbar;
  s.f_xtilde = core.f_xtilde;
  return s;
}

}  // namespace rqkp
