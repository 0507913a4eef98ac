#pragma once

// Problem model: the general box-constrained problem with a rank-one
// quadratic term,
//
//   minimize   (1/2) (q'x)^2 - c'x
//   subject to a'x = b,  l <= x <= u,
//
// and its reduced form with unit quadratic weights and zero lower bounds,
//
//   minimize   (1/2) (1'y)^2 - c'y
//   subject to a'y = b,  0 <= y <= u.
//
// reduce() performs the rescaling x_i -> q_i x_i followed by a shift that
// removes the lower bounds; back_transform() undoes both.

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "rqkp/common.hpp"

namespace rqkp {

struct GeneralInstance {
  int n = 0;
  std::vector<double> q;  // rank-one factor, q_i != 0
  std::vector<double> a;  // linear constraint coefficients
  double b = 0.0;
  std::vector<double> c;
  std::vector<double> l;
  std::vector<double> u;  // l_i <= u_i
};

// Reduced problem plus the record needed to map solutions back. Variables
// whose scaled interval collapses to a point (l_i == u_i originally) are
// dropped from the reduced data and pinned during back_transform; `kept`
// holds the original index of each surviving coordinate.
struct ReducedInstance {
  int n = 0;  // surviving variables
  std::vector<double> a;
  double b = 0.0;
  std::vector<double> c;
  std::vector<double> u;  // u_i > 0
  double offset = 0.0;    // constant absorbed by the change of variables

  int n_original = 0;
  std::vector<double> scale;  // per original variable: the factor q_i
  std::vector<double> shift;  // per original variable: scaled lower bound
  std::vector<int> kept;      // reduced coordinate -> original index
};

struct BoxSolution {
  std::vector<double> x;
  double objective = 0.0;
};

enum class Status { OPTIMAL, NEAR_OPTIMAL, INFEASIBLE };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::OPTIMAL: return "OPTIMAL";
    case Status::NEAR_OPTIMAL: return "NEAR_OPTIMAL";
    default: return "INFEASIBLE";
  }
}

struct SolveReport {
  Status status = Status::INFEASIBLE;
  std::vector<double> x;  // original coordinates
  double objective = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
  int phase = 0;  // 0 = no phase ran (e.g. infeasible screen)
  long long events_processed = 0;
  double time_ms = 0.0;
};

// ---------------------------------------------------------------------------

inline void validate(const GeneralInstance& g) {
  if (g.n < 1) throw std::invalid_argument("instance needs at least one variable");
  auto expect_len = [&](const std::vector<double>& v, const char* name) {
    if (static_cast<int>(v.size()) != g.n)
      throw std::invalid_argument(std::string(name) + " has wrong length");
  };
  expect_len(g.q, "q");
  expect_len(g.a, "a");
  expect_len(g.c, "c");
  expect_len(g.l, "l");
  expect_len(g.u, "u");
  for (int i = 0; i < g.n; ++i) {
    if (g.q[i] == 0.0) throw ZeroRankFactor(i);
    if (g.l[i] > g.u[i]) throw BadBounds(i);
  }
}

inline double general_objective(const GeneralInstance& g,
                                const std::vector<double>& x) {
  const double s = dot(g.q, x);
  return 0.5 * s * s - dot(g.c, x);
}

inline double reduced_objective(const ReducedInstance& r,
                                const std::vector<double>& y) {
  const double s = vec_sum(y);
  return 0.5 * s * s - dot(r.c, y);
}

/// Rescale by q and shift away the lower bounds. Throws ZeroRankFactor /
/// BadBounds on invalid data.
inline ReducedInstance reduce(const GeneralInstance& g) {
  validate(g);
  const int n = g.n;

  // Scaled interval of y_i = q_i x_i.
  std::vector<double> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    const double e1 = g.q[i] * g.l[i];
    const double e2 = g.q[i] * g.u[i];
    lo[i] = std::min(e1, e2);
    hi[i] = std::max(e1, e2);
  }

  // After the shift z = y - lo the objective picks up a constant and the
  // costs lose the scalar L = sum(lo):
  //   (1/2)(1'z + L)^2 - c''(z + lo)
  //     = (1/2)(1'z)^2 - (c'' - L)'z + [(1/2)L^2 - c'' lo].
  double L = 0.0;
  for (int i = 0; i < n; ++i) L += lo[i];

  ReducedInstance r;
  r.n_original = n;
  r.scale.resize(n);
  r.shift = lo;

  double b2 = g.b;
  double offset = 0.5 * L * L;
  for (int i = 0; i < n; ++i) {
    r.scale[i] = g.q[i];
    const double as = g.a[i] / g.q[i];
    const double cs = g.c[i] / g.q[i];
    b2 -= as * lo[i];
    offset -= cs * lo[i];
    const double width = hi[i] - lo[i];
    if (width > 0.0) {
      r.kept.push_back(i);
      r.a.push_back(as);
      r.c.push_back(cs - L);
      r.u.push_back(width);
    }
  }
  r.n = static_cast<int>(r.kept.size());
  r.b = b2;
  r.offset = offset;
  return r;
}

/// Range test for a'y = b over the reduced box: feasible iff
///   sum_{a_i<0} a_i u_i  <=  b  <=  sum_{a_i>0} a_i u_i
/// (with a small magnitude-relative slack for rounded data).
inline bool feasibility_check(const ReducedInstance& r,
                              const Tolerances& tol = {}) {
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < r.n; ++i) {
    if (r.a[i] > 0.0)
      hi += r.a[i] * r.u[i];
    else
      lo += r.a[i] * r.u[i];
  }
  const double slack = scaled_tol(tol.feasibility, r.b);
  return r.b >= lo - slack && r.b <= hi + slack;
}

/// Map a reduced-space point back to original coordinates. Pinned variables
/// (dropped during reduce) sit at their collapsed bound. The reported
/// objective is the reduced objective plus the accumulated constant.
inline SolveReport back_transform(const ReducedInstance& r,
                                  const BoxSolution& y, double lambda) {
  SolveReport rep;
  rep.x.resize(r.n_original);
  for (int i = 0; i < r.n_original; ++i)
    rep.x[i] = r.shift[i] / r.scale[i];
  for (int j = 0; j < r.n; ++j) {
    const int i = r.kept[j];
    rep.x[i] = (y.x[j] + r.shift[i]) / r.scale[i];
  }
  rep.objective = y.objective + r.offset;
  rep.lambda = lambda;
  return rep;
}

/// Forward map of an original-coordinate point into reduced space (the
/// inverse of back_transform on kept coordinates); mainly for tests.
inline std::vector<double> map_to_reduced(const ReducedInstance& r,
                                          const std::vector<double>& x) {
  std::vector<double> y(r.n);
  for (int j = 0; j < r.n; ++j) {
    const int i = r.kept[j];
    y[j] = r.scale[i] * x[i] - r.shift[i];
  }
  return y;
}

}  // namespace rqkp
