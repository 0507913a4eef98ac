#pragma once

// Two-phase driver. Phase one sweeps the crossing queue left to right until
// three consecutive dual samples form a strict peak, whose neighbours then
// bracket a maximizer. When the sweep drains without a peak (plateaus, a
// maximizer outside the crossing range, or no crossings at all), phase two
// brackets the maximizer by doubling expansion from the edges of the
// processed range and also revisits the best sampled neighbourhood. Either
// way a derivative-free scalar maximizer polishes the bracket, a primal point
// is rebuilt from inner minimizers around the final multiplier, and the
// report records status, gap, phase and crossing counts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "rqkp/common.hpp"
#include "rqkp/dual.hpp"
#include "rqkp/model.hpp"
#include "rqkp/sweep.hpp"

namespace rqkp {

// ---------------------------------------------------------------------------
// Scalar maximization: golden-section steps, with parabolic interpolation
// whenever the last three points support a trustworthy fit.

struct ScalarMaxConfig {
  double tolerance = 1e-10;  // width target, scaled by 1 + |x|
  int max_iter = 200;
};

struct ScalarMaxResult {
  double x = 0.0;
  double fx = 0.0;
  int iters = 0;
  bool converged = false;  // width target met before the iteration cap
};

/// Maximize a unimodal callable on [lo, hi]. The returned point is within
/// roughly 2 * tolerance * (1 + |x|) of the true maximizer; when the cap is
/// hit first, `converged` is false and the best point found is returned.
inline ScalarMaxResult maximize_scalar(const std::function<double(double)>& f,
                                       double lo, double hi,
                                       const ScalarMaxConfig& cfg = {}) {
  static constexpr double kGold = 0.3819660112501051;  // (3 - sqrt 5) / 2

  double a = lo, b = hi;
  if (b < a) std::swap(a, b);

  // Minimize the negation with the classic bounded local-minimum scheme.
  double x = a + kGold * (b - a);
  double w = x, v = x;
  double fx = -f(x);
  double fw = fx, fv = fx;
  double d = 0.0, e = 0.0;  // last step and the one before it

  ScalarMaxResult res;
  const int cap = std::max(3, cfg.max_iter);
  int it = 0;
  for (; it < cap; ++it) {
    const double m = 0.5 * (a + b);
    const double tol1 = scaled_tol(cfg.tolerance, x);
    const double tol2 = 2.0 * tol1;
    if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) {
      res.converged = true;
      break;
    }

    bool golden = true;
    if (std::fabs(e) > tol1) {
      // Parabola through (x,fx), (w,fw), (v,fv).
      const double r1 = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r1;
      q = 2.0 * (q - r1);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      const double e_prev = e;
      e = d;
      // Accept only steps that stay inside and beat half the step taken two
      // iterations ago; everything else falls back to a golden section.
      if (std::fabs(p) < std::fabs(0.5 * q * e_prev) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        const double u_try = x + d;
        if (u_try - a < tol2 || b - u_try < tol2) d = (x < m) ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x < m) ? b - x : a - x;
      d = kGold * e;
    }

    const double u_pt =
        (std::fabs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = -f(u_pt);
    if (fu <= fx) {
      if (u_pt < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u_pt; fx = fu;
    } else {
      if (u_pt < x) a = u_pt; else b = u_pt;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u_pt; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u_pt; fv = fu;
      }
    }
  }

  res.x = x;
  res.fx = -fx;
  res.iters = it;
  return res;
}

// ---------------------------------------------------------------------------
// Phase two: bracket the maximizer outside the processed range by doubling
// expansion, relying on concavity: once the sampled values stop improving the
// maximizer cannot lie further out.

namespace detail {

/// Walk away from `edge` in direction `dir` (+1 or -1), sampling at
/// edge + dir * s0 * 2^k with s0 = max(1, |edge|), until the value fails to
/// increase twice in a row; return the final abscissa. Returns nullopt when
/// `cap` doublings never turn, i.e. the function keeps rising along the ray.
inline std::optional<double> expand_edge(
    const std::function<double(double)>& phi, double edge, int dir,
    int cap = 200) {
  const double s0 = std::max(1.0, std::fabs(edge));
  double prev = phi(edge);
  double step = s0;
  int flat = 0;
  for (int k = 0; k < cap; ++k, step *= 2.0) {
    const double lam = edge + dir * step;
    const double val = phi(lam);
    flat = (val <= prev) ? flat + 1 : 0;
    prev = val;
    if (flat >= 2) return lam;
  }
  return std::nullopt;
}

}  // namespace detail

struct Phase2Brackets {
  std::optional<std::pair<double, double>> left;   // [far, lam_lb]
  std::optional<std::pair<double, double>> right;  // [lam_ub, far]
};

/// Finite intervals certified (by concavity) to contain the maximizer of phi
/// restricted to (-inf, lam_lb] and [lam_ub, +inf). A missing side means the
/// function rose through the whole expansion budget: the dual is unbounded
/// along that ray and the primal problem has no feasible point.
inline Phase2Brackets phase2_brackets(const std::function<double(double)>& phi,
                                      double lam_lb, double lam_ub,
                                      int cap = 200) {
  Phase2Brackets out;
  if (auto far = detail::expand_edge(phi, lam_lb, -1, cap))
    out.left = std::make_pair(*far, lam_lb);
  if (auto far = detail::expand_edge(phi, lam_ub, +1, cap))
    out.right = std::make_pair(lam_ub, *far);
  return out;
}

inline Phase2Brackets phase2_brackets(const ReducedInstance& r, double lam_lb,
                                      double lam_ub, int cap = 200) {
  return phase2_brackets(make_phi(r), lam_lb, lam_ub, cap);
}

// ---------------------------------------------------------------------------
// Primal recovery. The inner minimizer at the polished multiplier usually
// meets the constraint already; when it does not, the residual is pushed into
// the single strictly-interior coordinate or removed by blending the
// minimizers immediately left and right of the multiplier (the residual
// changes sign across a maximizer, so a zeroing blend exists).

struct PrimalRecovery {
  std::vector<double> x;
  double residual = 0.0;  // a'x - b
  double gap = 0.0;       // reduced objective at x minus the dual value
};

inline PrimalRecovery recover_primal(const ReducedInstance& r, double lambda,
                                     const Tolerances& tol = {}) {
  const DualEval at = eval_phi(r, lambda);
  auto assemble = [&](std::vector<double> x) {
    PrimalRecovery out;
    out.residual = dot(r.a, x) - r.b;
    out.gap = reduced_objective(r, x) - at.phi;
    out.x = std::move(x);
    return out;
  };
  const double feas = scaled_tol(tol.feasibility, r.b);

  // Move x along one coordinate so the constraint holds exactly. Used once
  // on the selected candidate, whose residual is already near tolerance:
  // stationarity makes the move second-order in the residual, so the gap is
  // kept while the constraint lands at rounding error - tighter than any
  // b-relative tolerance a caller could pick.
  auto polished = [&](PrimalRecovery c) {
    for (int i = 0; i < r.n; ++i) {
      const double margin = scaled_tol(tol.bound, r.u[i]);
      if (c.x[i] > margin && c.x[i] < r.u[i] - margin) {
        if (r.a[i] != 0.0) {
          const double moved = c.x[i] - c.residual / r.a[i];
          if (moved >= 0.0 && moved <= r.u[i]) {
            std::vector<double> x2 = c.x;
            x2[i] = moved;
            PrimalRecovery p = assemble(std::move(x2));
            if (std::fabs(p.residual) < std::fabs(c.residual)) return p;
          }
        }
        break;  // the inner minimizer has at most one interior coordinate
      }
    }
    return c;
  };

  std::vector<PrimalRecovery> cands;
  cands.push_back(assemble(at.x));
  const std::vector<double>& x0 = cands.front().x;
  const double resid0 = cands.front().residual;

  // Absorb the residual into the one strictly-interior coordinate. When the
  // residual is large (a plateau vertex at a dual kink) this overshoots the
  // minimizer, but then its gap loses the selection below.
  for (int i = 0; i < r.n; ++i) {
    const double margin = scaled_tol(tol.bound, r.u[i]);
    if (x0[i] > margin && x0[i] < r.u[i] - margin) {
      if (r.a[i] != 0.0) {
        const double moved = x0[i] - resid0 / r.a[i];
        if (moved >= 0.0 && moved <= r.u[i]) {
          std::vector<double> x2 = x0;
          x2[i] = moved;
          cands.push_back(assemble(std::move(x2)));
        }
      }
      break;  // the inner minimizer has at most one interior coordinate
    }
  }

  // Blend the minimizers on either side of lambda.
  {
    const double eps = 1e-7 * (1.0 + std::fabs(lambda));
    const DualEval lo = eval_phi(r, lambda - eps);
    const DualEval hi = eval_phi(r, lambda + eps);
    const double r_lo = dot(r.a, lo.x) - r.b;
    const double r_hi = dot(r.a, hi.x) - r.b;
    double theta = 0.5;  // weight on the left minimizer
    if (r_hi != r_lo) theta = std::clamp(r_hi / (r_hi - r_lo), 0.0, 1.0);
    std::vector<double> xc(r.n);
    for (int i = 0; i < r.n; ++i)
      xc[i] = theta * lo.x[i] + (1.0 - theta) * hi.x[i];
    cands.push_back(assemble(std::move(xc)));
  }

  // Smallest gap among constraint-satisfying candidates; smallest residual
  // magnitude when none qualifies. Ties keep the earliest candidate.
  const PrimalRecovery* best = nullptr;
  for (const PrimalRecovery& c : cands) {
    if (std::fabs(c.residual) > feas) continue;
    if (!best || c.gap < best->gap) best = &c;
  }
  if (!best) {
    for (const PrimalRecovery& c : cands)
      if (!best || std::fabs(c.residual) < std::fabs(best->residual))
        best = &c;
  }
  return polished(*best);
}

// ---------------------------------------------------------------------------
// Assembly.

struct SolveConfig {
  Tolerances tol;
  ScalarMaxConfig scalar;
  TraceFn trace;  // optional: receives every crossing the sweep processes
};

/// Drop coordinates whose box has collapsed to {0}; they contribute nothing
/// to the constraint or the objective. Hand-assembled instances without
/// back-transform bookkeeping get the identity mapping filled in.
inline ReducedInstance strip_collapsed(ReducedInstance r) {
  if (static_cast<int>(r.kept.size()) != r.n) {
    r.n_original = r.n;
    r.scale.assign(r.n, 1.0);
    r.shift.assign(r.n, 0.0);
    r.kept.resize(r.n);
    for (int i = 0; i < r.n; ++i) r.kept[i] = i;
  }
  bool any = false;
  for (double w : r.u)
    if (!(w > 0.0)) any = true;
  if (!any) return r;

  ReducedInstance s;
  s.b = r.b;
  s.offset = r.offset;
  s.n_original = r.n_original;
  s.scale = r.scale;
  s.shift = r.shift;
  for (int i = 0; i < r.n; ++i) {
    if (r.u[i] > 0.0) {
      s.a.push_back(r.a[i]);
      s.c.push_back(r.c[i]);
      s.u.push_back(r.u[i]);
      s.kept.push_back(r.kept[i]);
    }
  }
  s.n = static_cast<int>(s.a.size());
  return s;
}

namespace detail {

struct LambdaCandidate {
  double lambda = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  bool converged = true;
};

}  // namespace detail

inline SolveReport solve_reduced(const ReducedInstance& r_in,
                                 const SolveConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed_ms = [&t0] {
    return std::chrono::duration<double, std::milli>(clock::now() - t0)
        .count();
  };

  const ReducedInstance r = strip_collapsed(r_in);

  auto fixed_report = [&](Status st, int phase, long long events) {
    BoxSolution y;
    y.x.assign(r.n, 0.0);
    y.objective = 0.0;
    SolveReport rep = back_transform(r, y, 0.0);
    rep.status = st;
    rep.gap = 0.0;
    rep.phase = phase;
    rep.events_processed = events;
    rep.time_ms = elapsed_ms();
    return rep;
  };

  // Nothing left to optimize: the constraint must hold by itself.
  if (r.n == 0)
    return fixed_report(
        feasibility_check(r, cfg.tol) ? Status::OPTIMAL : Status::INFEASIBLE,
        0, 0);

  // Range screen: the box cannot meet the constraint at all.
  if (!feasibility_check(r, cfg.tol))
    return fixed_report(Status::INFEASIBLE, 0, 0);

  SweepState sw = init_sweep(r);
  if (cfg.trace) sw.set_trace(cfg.trace);
  const Bracket br = run_phase1(sw);
  const auto phi = make_phi(r);

  std::vector<detail::LambdaCandidate> cands;
  int phase;
  if (br.bracketed) {
    phase = 1;
    const ScalarMaxResult m = maximize_scalar(phi, br.lo, br.hi, cfg.scalar);
    cands.push_back({m.x, m.fx, m.converged});
    cands.push_back({br.mid, phi(br.mid), true});
  } else {
    phase = 2;
    const double lb = br.any_events ? br.lam_lb : 0.0;
    const double ub = br.any_events ? br.lam_ub : 0.0;
    const Phase2Brackets pb = phase2_brackets(phi, lb, ub);
    if (!pb.left || !pb.right) {
      // The dual kept rising through the whole expansion budget: no feasible
      // point exists (the range screen only rules out clear violations).
      return fixed_report(Status::INFEASIBLE, 2, br.crossings);
    }
    const ScalarMaxResult ml =
        maximize_scalar(phi, pb.left->first, pb.left->second, cfg.scalar);
    cands.push_back({ml.x, ml.fx, ml.converged});
    const ScalarMaxResult mr =
        maximize_scalar(phi, pb.right->first, pb.right->second, cfg.scalar);
    cands.push_back({mr.x, mr.fx, mr.converged});
    if (br.any_events) {
      const ScalarMaxResult mi =
          maximize_scalar(phi, br.best_before, br.best_after, cfg.scalar);
      cands.push_back({mi.x, mi.fx, mi.converged});
      cands.push_back({br.best_lambda, phi(br.best_lambda), true});
    }
  }

  std::size_t win = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (cands[i].value > cands[win].value) win = i;
  const double lam_star = cands[win].lambda;
  const bool converged = cands[win].converged;

  const PrimalRecovery rec = recover_primal(r, lam_star, cfg.tol);
  const double f_reduced = reduced_objective(r, rec.x);
  const double phi_star = f_reduced - rec.gap;

  BoxSolution y;
  y.x = rec.x;
  y.objective = f_reduced;
  SolveReport rep = back_transform(r, y, lam_star);
  rep.gap = rec.gap;
  rep.phase = phase;
  rep.events_processed = br.crossings;

  const bool feas_ok =
      std::fabs(rec.residual) <= scaled_tol(cfg.tol.feasibility, r.b);
  const bool gap_ok = rec.gap <= scaled_tol(cfg.tol.gap, phi_star);
  rep.status = (feas_ok && gap_ok && converged) ? Status::OPTIMAL
                                                : Status::NEAR_OPTIMAL;
  rep.time_ms = elapsed_ms();
  return rep;
}

inline SolveReport solve(const GeneralInstance& g, const SolveConfig& cfg = {}) {
  return solve_reduced(reduce(g), cfg);
}

}  // namespace rqkp
