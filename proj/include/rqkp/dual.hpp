#pragma once

// Lagrangian dual of the reduced problem. Moving the coupling constraint
// a'x = b into the objective with multiplier lambda gives
//
//   phi(lambda) = lambda*b + min { (1/2)(1'x)^2 - (c + lambda a)'x : 0<=x<=u },
//
// a concave piecewise-quadratic function of lambda. The inner problem is the
// box subproblem with shifted costs c_i(lambda) = c_i + lambda*a_i, so each
// evaluation is one sorted-view solve. Between cost-line crossings the local
// behaviour falls into one of three shapes:
//
//   AFFINE    - the minimizer is a constant vertex of the box, so phi is a
//               straight line with slope b - a'x.
//   QUADRATIC - the minimizer keeps one coordinate (the pivot k) fractional
//               at value c_k(lambda) - U_{k-1}; substituting it in makes phi
//               a parabola in lambda.
//
// The three classification labels below distinguish which side of the sorted
// order carries the fractional pivot: PLATEAU (constant vertex), LIFT_NEXT
// (pivot is the first coordinate past the full prefix) and SHRINK_LAST
// (pivot is the last coordinate of the prefix itself).

#include <cmath>
#include <functional>
#include <vector>

#include "rqkp/bounded.hpp"
#include "rqkp/common.hpp"
#include "rqkp/model.hpp"

namespace rqkp {

enum class PieceType {
  TYPE_I,   // plateau: minimizer is a constant box vertex, phi locally affine
  TYPE_II,  // pivot k = nbar: fractional lift of the coordinate after the prefix
  TYPE_III  // pivot k = nbar-1: fractional pull-back of the last prefix coordinate
};

inline const char* piece_name(PieceType p) {
  switch (p) {
    case PieceType::TYPE_I: return "I";
    case PieceType::TYPE_II: return "II";
    default: return "III";
  }
}

struct DualEval {
  double lambda = 0.0;
  double phi = 0.0;        // lambda*b + inner minimum
  double inner = 0.0;      // value of the box subproblem alone
  std::vector<double> x;   // a minimizer of the inner problem
  PieceType piece = PieceType::TYPE_I;
  int nbar = 0;            // 1-based crossover index in the sorted view, 0 if none
  int piece_k = 0;         // 1-based pivot of the quadratic piece, 0 for TYPE_I
  std::vector<double> c_lambda;
  SortedView view;         // sorted view of the shifted costs at this lambda
};

/// Evaluate phi(lambda) from scratch: shift costs, sort, solve the box
/// subproblem, and classify the local piece.
inline DualEval eval_phi(const ReducedInstance& r, double lambda) {
  DualEval ev;
  ev.lambda = lambda;
  ev.c_lambda.resize(r.n);
  for (int i = 0; i < r.n; ++i) ev.c_lambda[i] = r.c[i] + lambda * r.a[i];

  ev.view = build_sorted_view(ev.c_lambda, r.u);
  const SortedView& v = ev.view;
  const CoreResult core = solve_core(v);
  ev.x = materialize(v, core, r.n);
  ev.inner = core.objective;
  ev.phi = lambda * r.b + core.objective;

  const int m = v.m;
  const int nb = core.nbar_pos;  // 0-based; == m when every merit is negative
  ev.nbar = nb < m ? nb + 1 : 0;

  if (m == 0) {
    ev.piece = PieceType::TYPE_I;  // x = 0 locally constant
    ev.piece_k = 0;
  } else if (nb == m) {
    // Every merit value negative: the last coordinate lifts by
    // min{c_m(lambda) - U_{m-1}, u_m}. Fractional lift -> parabola with pivot
    // m; clamped lift -> the box vertex x^{(m)}, an affine piece.
    if (v.c[m - 1] - v.prefix_u[m - 1] < v.u[m - 1]) {
      ev.piece = PieceType::TYPE_II;
      ev.piece_k = m;
    } else {
      ev.piece = PieceType::TYPE_I;
      ev.piece_k = 0;
    }
  } else if (nb == 0) {
    // Crossover at the first coordinate: minimizer c_1(lambda) e_1, always
    // fractional (the merit sign test forces c_1 <= u_1/2 + slack).
    ev.piece = PieceType::TYPE_II;
    ev.piece_k = 1;
  } else {
    // 2 <= nbar <= m: compare U_{nbar-1} with the neighbouring shifted costs;
    // at boundary equalities the earlier label wins (the competing pieces
    // take equal values there, so the choice is value-irrelevant).
    const double c_prev = v.c[nb - 1];     // c_{nbar-1}(lambda)
    const double c_next = v.c[nb];         // c_{nbar}(lambda)
    const double cap = v.prefix_u[nb];     // U_{nbar-1}
    if (c_prev >= cap && cap >= c_next) {
      ev.piece = PieceType::TYPE_I;  // minimizer x^{(nbar-1)}
      ev.piece_k = 0;
    } else if (cap <= c_next) {
      ev.piece = PieceType::TYPE_II;
      ev.piece_k = nb + 1;  // pivot nbar
    } else {
      ev.piece = PieceType::TYPE_III;
      ev.piece_k = nb;  // pivot nbar-1
    }
  }
  return ev;
}

// Quadratic piece p_k(lambda) = A lambda^2 + B lambda + C describing the
// inner minimum while the pivot coordinate k stays fractional, so that
// phi(lambda) = lambda*b + p_k(lambda) on the piece's interval.
struct QuadPiece {
  int k = 0;  // 1-based pivot position in the sorted view
  double A = 0.0, B = 0.0, C = 0.0;
  std::vector<double> d;  // base point: full prefix + base-cost lift at the pivot

  double eval(double lambda) const { return (A * lambda + B) * lambda + C; }
};

/// Build the quadratic piece for pivot position k (1-based) of the given
/// sorted view. The coefficients use the base costs permuted into the view's
/// order: with pivot index j = order[k-1],
///   d   = x^{(k-1)} + (c_j - U_{k-1}) e_j,
///   A   = -a_j^2 / 2,   B = -a'd,   C = c_j^2 / 2 - c'd.
inline QuadPiece piece_poly(const ReducedInstance& r, int k,
                            const SortedView& view) {
  if (k < 1 || k > view.m) throw IndexOutOfRange(k);
  QuadPiece p;
  p.k = k;
  p.d.assign(r.n, 0.0);
  for (int t = 0; t < k - 1; ++t) p.d[view.order[t]] = view.u[t];
  const int j = view.order[k - 1];
  p.d[j] = r.c[j] - view.prefix_u[k - 1];
  p.A = -0.5 * r.a[j] * r.a[j];
  p.B = -dot(r.a, p.d);
  p.C = 0.5 * r.c[j] * r.c[j] - dot(r.c, p.d);
  return p;
}

/// Scalar dual callable for optimizers: one fresh inner solve per call.
inline std::function<double(double)> make_phi(const ReducedInstance& r) {
  return [&r](double lambda) {
    std::vector<double> cl(r.n);
    for (int i = 0; i < r.n; ++i) cl[i] = r.c[i] + lambda * r.a[i];
    const SortedView v = build_sorted_view(cl, r.u);
    return lambda * r.b + solve_core(v).objective;
  };
}

}  // namespace rqkp
