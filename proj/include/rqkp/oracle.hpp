#pragma once

// Slow, independent reference solvers used to cross-check the fast path.
// Nothing here shares logic with bounded.hpp / sweep.hpp / driver.hpp: each
// oracle re-derives its answer from first principles.
//
//  * greedy_s_oracle   - box problem via the scalar profile h(s), where for a
//                        fixed coordinate sum s the best cost c'x is the
//                        greedy fill; h is piecewise quadratic and convex.
//  * kkt_enumerate     - equality-constrained problem by brute force over all
//                        3^n assignments {LOWER, UPPER, FREE}.
//  * grid_dual         - dense sampling of a scalar dual function plus golden
//                        refinement around the best cell.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "rqkp/common.hpp"
#include "rqkp/model.hpp"

namespace rqkp {
namespace oracle {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OracleResult {
  bool feasible = false;
  std::vector<double> x;
  double objective = kInf;
};

// ---------------------------------------------------------------------------
// greedy_s_oracle

// Best objective of min (1/2)(1'x)^2 - c'x over 0 <= x <= u, obtained by
// scanning the coordinate sum s: on each greedy segment [U_k, U_{k+1}] the
// profile (1/2)s^2 - (best c'x given s) is a parabola with vertex at the
// segment's unit cost.
inline OracleResult greedy_s_oracle(const std::vector<double>& c,
                                    const std::vector<double>& u) {
  const int n = static_cast<int>(c.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int i, int j) { return c[i] > c[j]; });

  double best_s = 0.0, best_h = 0.0;  // s = 0 is always available
  double breakpoint = 0.0, gain = 0.0;
  for (int k = 0; k < n; ++k) {
    const int i = idx[k];
    if (u[i] <= 0.0) continue;
    const double seg_lo = breakpoint;
    const double seg_hi = breakpoint + u[i];
    // On this segment h(s) = s^2/2 - gain - c_i (s - seg_lo).
    const double s_star = std::clamp(c[i], seg_lo, seg_hi);
    const double h = 0.5 * s_star * s_star - gain - c[i] * (s_star - seg_lo);
    if (h < best_h) {
      best_h = h;
      best_s = s_star;
    }
    breakpoint = seg_hi;
    gain += c[i] * u[i];
  }

  // Rebuild the minimizer by re-running the greedy fill up to best_s.
  OracleResult res;
  res.feasible = true;
  res.x.assign(n, 0.0);
  double remaining = best_s;
  for (int k = 0; k < n && remaining > 0.0; ++k) {
    const int i = idx[k];
    if (u[i] <= 0.0) continue;
    const double take = std::min(remaining, u[i]);
    res.x[i] = take;
    remaining -= take;
  }
  res.objective = best_h;
  return res;
}

// ---------------------------------------------------------------------------
// kkt_enumerate

namespace detail {

inline double plain_objective(const std::vector<double>& c,
                              const std::vector<double>& x) {
  double s = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i];
    lin += c[i] * x[i];
  }
  return 0.5 * s * s - lin;
}

// Fill values for the free coordinates so that their sum is S and their
// a-weighted sum is B, staying inside [0, u]. Returns nullopt when the pair
// (S, B) is unreachable. Works by interpolating between the two greedy
// extremes of the a-weighted sum at fixed total S.
inline std::optional<std::vector<double>> two_sum_fill(
    const std::vector<double>& a, const std::vector<double>& u, double S,
    double B, double tol) {
  const int k = static_cast<int>(a.size());
  double cap = 0.0;
  for (double v : u) cap += v;
  if (S < -tol || S > cap + tol) return std::nullopt;
  const double s = std::clamp(S, 0.0, cap);

  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);

  auto greedy = [&](bool ascending) {
    std::vector<int> ord = idx;
    std::sort(ord.begin(), ord.end(), [&](int i, int j) {
      if (a[i] != a[j]) return ascending ? a[i] < a[j] : a[i] > a[j];
      return i < j;
    });
    std::vector<double> x(k, 0.0);
    double rem = s;
    for (int i : ord) {
      const double take = std::min(rem, u[i]);
      x[i] = take;
      rem -= take;
      if (rem <= 0.0) break;
    }
    return x;
  };

  const std::vector<double> xmin = greedy(true);   // minimizes a'x
  const std::vector<double> xmax = greedy(false);  // maximizes a'x
  double bmin = 0.0, bmax = 0.0;
  for (int i = 0; i < k; ++i) {
    bmin += a[i] * xmin[i];
    bmax += a[i] * xmax[i];
  }
  if (B < bmin - tol || B > bmax + tol) return std::nullopt;

  double theta = 0.0;
  if (bmax > bmin) theta = std::clamp((B - bmin) / (bmax - bmin), 0.0, 1.0);
  std::vector<double> x(k);
  for (int i = 0; i < k; ++i) x[i] = (1.0 - theta) * xmin[i] + theta * xmax[i];
  return x;
}

}  // namespace detail

/// Exhaustive KKT-pattern search for
///   min (1/2)(1'x)^2 - c'x  s.t.  a'x = b, 0 <= x <= u.
/// Every coordinate is assigned LOWER, UPPER or FREE; free coordinates must
/// share a stationarity line s = c_i + lambda a_i, which pins the scalar
/// unknowns (s, lambda) down to a 2x2 solve. Capped at n <= 12.
inline OracleResult kkt_enumerate(const ReducedInstance& r) {
  constexpr int kMaxN = 12;
  const int n = r.n;
  if (n > kMaxN) throw TooLarge(n, kMaxN);

  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    scale = std::max({scale, std::fabs(r.c[i]), std::fabs(r.a[i])});
  const double ctol = 1e-9 * scale;            // stationarity consistency
  const double btol = 1e-9 * (1.0 + std::fabs(r.b));

  OracleResult best;
  std::vector<int> state(n, 0);  // 0 lower, 1 upper, 2 free

  long long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;

  std::vector<int> free_idx;
  std::vector<double> fa, fu;
  for (long long code = 0; code < total; ++code) {
    long long rem = code;
    double sum_fixed = 0.0, b_fixed = 0.0;
    free_idx.clear();
    for (int i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rem % 3);
      rem /= 3;
      if (state[i] == 1) {
        sum_fixed += r.u[i];
        b_fixed += r.a[i] * r.u[i];
      } else if (state[i] == 2) {
        free_idx.push_back(i);
      }
    }

    std::vector<double> x;
    if (free_idx.empty()) {
      if (std::fabs(b_fixed - r.b) > btol) continue;
      x.assign(n, 0.0);
      for (int i = 0; i < n; ++i)
        if (state[i] == 1) x[i] = r.u[i];
    } else {
      // Stationarity: s = c_i + lambda a_i for every free coordinate.
      const int f0 = free_idx[0];
      double s_val = 0.0, lambda = 0.0;
      bool have_line = false;
      for (std::size_t t = 1; t < free_idx.size() && !have_line; ++t) {
        const int ft = free_idx[t];
        if (std::fabs(r.a[ft] - r.a[f0]) > 0.0) {
          lambda = (r.c[f0] - r.c[ft]) / (r.a[ft] - r.a[f0]);
          s_val = r.c[f0] + lambda * r.a[f0];
          have_line = true;
        }
      }

      double S_free, B_free;
      if (have_line) {
        bool ok = true;
        for (int fi : free_idx)
          if (std::fabs(r.c[fi] + lambda * r.a[fi] - s_val) > ctol) ok = false;
        if (!ok) continue;
        S_free = s_val - sum_fixed;
        B_free = r.b - b_fixed;
      } else {
        // All free coordinates share one a-value.
        const double a0 = r.a[f0];
        bool ok = true;
        for (int fi : free_idx)
          if (std::fabs(r.c[fi] - r.c[f0]) > ctol) ok = false;
        if (!ok) continue;
        if (a0 != 0.0) {
          B_free = r.b - b_fixed;
          S_free = B_free / a0;
        } else {
          if (std::fabs(r.b - b_fixed) > btol) continue;
          B_free = 0.0;
          S_free = r.c[f0] - sum_fixed;  // s = c on the free set
        }
      }

      fa.clear();
      fu.clear();
      for (int fi : free_idx) {
        fa.push_back(r.a[fi]);
        fu.push_back(r.u[fi]);
      }
      auto fill = detail::two_sum_fill(fa, fu, S_free, B_free, btol);
      if (!fill) continue;

      x.assign(n, 0.0);
      for (int i = 0; i < n; ++i)
        if (state[i] == 1) x[i] = r.u[i];
      for (std::size_t t = 0; t < free_idx.size(); ++t)
        x[free_idx[t]] = (*fill)[t];
      // Accept only if the constraint really holds.
      double resid = -r.b;
      for (int i = 0; i < n; ++i) resid += r.a[i] * x[i];
      if (std::fabs(resid) > 10.0 * btol) continue;
    }

    const double obj = detail::plain_objective(r.c, x);
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.x = x;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// grid_dual

struct GridResult {
  double lambda = 0.0;
  double value = -kInf;
};

/// Dense scan of a scalar function over [lo, hi] followed by golden-section
/// refinement around the best sample. Intended for concave functions.
inline GridResult grid_dual(const std::function<double(double)>& phi,
                            double lo, double hi, int points = 2001) {
  GridResult res;
  if (hi < lo) std::swap(lo, hi);
  if (points < 2 || hi == lo) {
    res.lambda = lo;
    res.value = phi(lo);
    return res;
  }
  double best_lam = lo, best_val = -kInf;
  for (int i = 0; i < points; ++i) {
    const double lam = lo + (hi - lo) * i / (points - 1);
    const double val = phi(lam);
    if (val > best_val) {
      best_val = val;
      best_lam = lam;
    }
  }
  const double step = (hi - lo) / (points - 1);
  double a = std::max(lo, best_lam - step);
  double b = std::min(hi, best_lam + step);
  // Golden-section shrink on [a, b].
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::fabs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = phi(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = phi(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = phi(mid);
  res.lambda = fm > best_val ? mid : best_lam;
  res.value = std::max(fm, best_val);
  return res;
}

}  // namespace oracle
}  // namespace rqkp
