#pragma once

// Phase one: a left-to-right plane sweep over every pairwise intersection
// of the cost lines  v_i(lambda) = c_i + lambda a_i  (ids 1..n, one per
// variable) plus the constant zero line (id 0). The sweep keeps the ids
// sorted by current value, so the sorted order the box subproblem needs is
// maintained incrementally instead of re-sorted per lambda, and the dual
// value at any lambda inside the current interval costs O(log n).
//
// Event handling: each of the n adjacency boundaries owns a key - the
// crossing abscissa of the two lines currently sharing it (+inf when they
// diverge or are parallel) - mirrored into an indexed min-heap. Keys are
// updated in place, so memory stays O(n) and a stale event cannot exist.
// One step gathers every boundary whose key ties the minimum abscissa
// exactly (identical crossing fractions round to identical doubles), widens
// each into the full span of equal line values, and re-sorts the span into
// the order that holds just right of the abscissa. The crossings charged to
// the step are the pairs whose relative order actually flipped, so
// coincident bundles are counted exactly once per pair. A re-computed key
// that does not clear the current abscissa is nudged one ulp right, which
// keeps processed abscissas strictly increasing.
//
// Integral data make crossings collide on a few exact abscissas, so one
// step often re-keys thousands of boundaries. All keys written during a
// step point past the current abscissa, so heap repair is deferred to the
// end of the step: a handful of dirty keys are sifted individually, while a
// large batch triggers a linear rebuild, keeping the amortized cost per
// crossing constant in that regime.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "rqkp/common.hpp"
#include "rqkp/model.hpp"

namespace rqkp {

/// One processed sweep event: all crossings sharing a single abscissa.
struct StepInfo {
  double lambda = 0.0;
  long long crossings = 0;  // pairs whose order flipped at this abscissa
  double phi = 0.0;         // dual value at lambda (order just left of it)
};

/// Diagnostic hook: (lambda, idLow, idHigh, phi) per crossed line pair.
using TraceFn = std::function<void(double, int, int, double)>;

class SweepState {
 public:
  explicit SweepState(const ReducedInstance& r) : nlines_(r.n + 1), b_(r.b) {
    slope_.assign(nlines_, 0.0);
    icept_.assign(nlines_, 0.0);
    ubnd_.assign(nlines_, 0.0);  // the zero line carries no bound mass
    for (int i = 0; i < r.n; ++i) {
      slope_[i + 1] = r.a[i];
      icept_[i + 1] = r.c[i];
      ubnd_[i + 1] = r.u[i];
    }
    status_.resize(nlines_);
    for (int t = 0; t < nlines_; ++t) status_[t] = t;
    // Descending value as lambda -> -inf: ascending slope, then descending
    // intercept (parallel lines keep a constant value order), then id.
    std::sort(status_.begin(), status_.end(), [&](int x, int y) {
      if (slope_[x] != slope_[y]) return slope_[x] < slope_[y];
      if (icept_[x] != icept_[y]) return icept_[x] > icept_[y];
      return x < y;
    });
    pos_.resize(nlines_);
    for (int t = 0; t < nlines_; ++t) pos_[status_[t]] = t;
    pu_.resize(nlines_ + 1);
    pcu_.resize(nlines_ + 1);
    pau_.resize(nlines_ + 1);
    rebuild_prefixes();

    const int nb = nlines_ - 1;
    key_.resize(nb);
    heap_.resize(nb);
    hpos_.resize(nb);
    for (int j = 0; j < nb; ++j) {
      key_[j] = boundary_cross(j);
      heap_[j] = {key_[j], j};
      hpos_[j] = j;
    }
    for (int i = nb >= 2 ? (nb - 2) / kArity : -1; i >= 0; --i) sift_down(i);
    dirty_stamp_.assign(nb, -1);
    rank_.assign(nlines_, 0);
    val_.assign(nlines_, 0.0);
  }

  bool has_events() const {
    return !heap_.empty() && heap_[0].key < kInf;
  }

  /// Abscissa of the next pending event; +inf when none remain.
  double next_abscissa() const {
    return heap_.empty() ? kInf : heap_[0].key;
  }

  /// Sorted distinct abscissas currently scheduled (adjacent pairs only).
  std::vector<double> pending_abscissas() const {
    std::vector<double> out;
    for (const double k : key_)
      if (k < kInf) out.push_back(k);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Line ids ordered by descending current value.
  const std::vector<int>& status() const { return status_; }

  /// Ids whose value is below the zero line (vanished variables), ascending.
  std::vector<int> zero_fixed() const {
    std::vector<int> out(status_.begin() + pos_[0] + 1, status_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  long long crossings() const { return crossings_; }
  long long steps() const { return steps_; }
  void set_trace(TraceFn fn) { trace_ = std::move(fn); }

  /// Process every crossing at the next pending abscissa.
  StepInfo step() {
    if (!has_events()) throw QueueEmpty{};
    const double lam = heap_[0].key;
    const double phi = phi_at(lam);  // pre-exchange order is valid at lam

    // Gather every boundary keyed at this abscissa. Ancestors of a minimal
    // node are minimal too, so the tied nodes form one subtree under the
    // root and a pruned walk finds them all without disturbing the heap.
    work_.clear();
    dfs_.clear();
    dfs_.push_back(0);
    const int nb = static_cast<int>(heap_.size());
    while (!dfs_.empty()) {
      const int s = dfs_.back();
      dfs_.pop_back();
      work_.push_back(heap_[s].id);
      const int c0 = kArity * s + 1;
      const int c1 = std::min(c0 + kArity, nb);
      for (int c = c0; c < c1; ++c)
        if (heap_[c].key == lam) dfs_.push_back(c);
    }

    // Drain the tie span by span. Every re-key lands strictly right of lam,
    // so no new work appears mid-step and a boundary swallowed by an earlier
    // span's refresh has already moved on when its own turn comes.
    long long crossed = 0;
    for (const int j0 : work_) {
      if (key_[j0] != lam) continue;
      int lo = j0;  // boundary j sits between positions j and j+1
      int hi = j0 + 1;
      while (lo > 0 &&
             line_value(status_[lo - 1], lam) == line_value(status_[lo], lam))
        --lo;
      while (hi + 1 < nlines_ &&
             line_value(status_[hi + 1], lam) == line_value(status_[hi], lam))
        ++hi;
      crossed += resort_span(lo, hi, lam, phi);
      refresh_keys(lo, hi, lam);
    }
    repair_heap();

    crossings_ += crossed;
    ++steps_;
    if (++steps_since_rebuild_ >= kRebuildEvery) {
      rebuild_prefixes();
      steps_since_rebuild_ = 0;
    }
    return {lam, crossed, phi};
  }

  /// Dual value from the incrementally maintained order. `lam` must lie
  /// between the previously processed event and the next pending one
  /// (inclusive); elsewhere the maintained order no longer matches the
  /// value order and the result is unspecified.
  double phi_at(double lam) const {
    const int D = pos_[0];  // lines above the zero line = active variables
    if (D == 0) return lam * b_;
    // First 0-based position in [0, D] whose merit value
    //   G_k = U_k + u_k / 2 - c_k(lam)
    // clears the same cost-relative slack the from-scratch solver uses;
    // D when every merit value is negative.
    const auto merit_ok = [&](int k) {
      const int id = status_[k];
      const double cm = line_value(id, lam);
      return pu_[k] + 0.5 * ubnd_[id] - cm >= -1e-12 * (1.0 + std::fabs(cm));
    };
    // Seed with the previous crossover: successive calls move it rarely and
    // by little, so probing the seed and one neighbour usually settles the
    // search in O(1); otherwise fall through to the plain binary search.
    int lo = 0, hi = D;
    const int h = hint_ >= D ? D - 1 : (hint_ < 0 ? 0 : hint_);
    if (merit_ok(h)) {
      hi = h;
      if (h == 0 || !merit_ok(h - 1))
        lo = h;
      else
        hi = h - 1;
    } else {
      lo = h + 1;
      if (lo < D) {
        if (merit_ok(lo))
          hi = lo;
        else
          ++lo;
      }
    }
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (merit_ok(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    hint_ = lo;
    double inner;
    if (lo == D) {
      const int id = status_[D - 1];
      const double cd = line_value(id, lam);
      inner = prefix_plus(D - 1, std::min(cd - pu_[D - 1], ubnd_[id]), cd, lam);
    } else if (lo == 0) {
      const int id = status_[0];
      const double c0 = line_value(id, lam);
      inner = prefix_plus(0, std::min(c0, ubnd_[id]), c0, lam);
    } else {
      const int ib = status_[lo - 1], ia = status_[lo];
      const double cb = line_value(ib, lam), ca = line_value(ia, lam);
      const double f_bar =
          prefix_plus(lo - 1, std::min(cb - pu_[lo - 1], ubnd_[ib]), cb, lam);
      const double f_tilde =
          prefix_plus(lo, std::max(ca - pu_[lo], 0.0), ca, lam);
      inner = std::min(f_bar, f_tilde);
    }
    return lam * b_ + inner;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr int kRebuildEvery = 4096;  // bound float drift in prefixes
  static constexpr int kArity = 8;            // heap fan-out: shallow + cache-dense

  struct Node {
    double key = 0.0;  // crossing abscissa of the boundary's current pair
    int id = 0;        // boundary index
  };

  double line_value(int id, double lam) const {
    return icept_[id] + lam * slope_[id];
  }

  // Value of saturating the first p status lines plus t on the line at
  // position p, whose value at lam is cp.
  double prefix_plus(int p, double t, double cp, double lam) const {
    const double s = pu_[p] + t;
    return 0.5 * s * s - ((pcu_[p] + lam * pau_[p]) + t * cp);
  }

  void rebuild_prefixes() {
    pu_[0] = pcu_[0] = pau_[0] = 0.0;
    for (int p = 0; p < nlines_; ++p) {
      const int id = status_[p];
      pu_[p + 1] = pu_[p] + ubnd_[id];
      pcu_[p + 1] = pcu_[p] + icept_[id] * ubnd_[id];
      pau_[p + 1] = pau_[p] + slope_[id] * ubnd_[id];
    }
  }

  // Crossing abscissa of the two lines sharing boundary j; +inf when the
  // upper line does not converge onto the lower one.
  double boundary_cross(int j) const {
    const int up = status_[j], dn = status_[j + 1];
    if (slope_[up] >= slope_[dn]) return kInf;
    return (icept_[up] - icept_[dn]) / (slope_[dn] - slope_[up]);
  }

  // Re-sort positions [lo, hi] for the order just right of lam and return
  // the number of pairs whose relative order flipped.
  long long resort_span(int lo, int hi, double lam, double phi) {
    const int g = hi - lo + 1;
    if (g == 2) {  // the overwhelmingly common span: one pair of lines
      const int x = status_[lo], y = status_[hi];
      const double vx = line_value(x, lam), vy = line_value(y, lam);
      // Same order the general sort below produces just right of lam.
      const bool keep =
          vx != vy ? vx > vy
                   : (slope_[x] != slope_[y] ? slope_[x] > slope_[y] : x < y);
      if (keep) return 0;
      if (trace_) trace_(lam, std::min(x, y), std::max(x, y), phi);
      status_[lo] = y;
      status_[hi] = x;
      pos_[x] = hi;
      pos_[y] = lo;
      pu_[hi] = pu_[lo] + ubnd_[y];
      pcu_[hi] = pcu_[lo] + icept_[y] * ubnd_[y];
      pau_[hi] = pau_[lo] + slope_[y] * ubnd_[y];
      return 1;
    }
    if (g <= 4 && !trace_) {
      // Insertion sort in fixed storage; each shift flips one adjacent
      // pair, so the shift count is exactly the inversion count.
      int id[4];
      double v[4], sl[4];
      for (int t = 0; t < g; ++t) {
        id[t] = status_[lo + t];
        v[t] = line_value(id[t], lam);
        sl[t] = slope_[id[t]];
      }
      long long crossed = 0;
      for (int t = 1; t < g; ++t) {
        const int ci = id[t];
        const double cv = v[t], cs = sl[t];
        int p = t;
        while (p > 0) {
          const bool ahead =
              v[p - 1] != cv
                  ? v[p - 1] > cv
                  : (sl[p - 1] != cs ? sl[p - 1] > cs : id[p - 1] < ci);
          if (ahead) break;
          id[p] = id[p - 1];
          v[p] = v[p - 1];
          sl[p] = sl[p - 1];
          ++crossed;
          --p;
        }
        id[p] = ci;
        v[p] = cv;
        sl[p] = cs;
      }
      if (crossed == 0) return 0;
      for (int t = 0; t < g; ++t) {
        status_[lo + t] = id[t];
        pos_[id[t]] = lo + t;
      }
      for (int p = lo; p < hi; ++p) {
        const int s = status_[p];
        pu_[p + 1] = pu_[p] + ubnd_[s];
        pcu_[p + 1] = pcu_[p] + icept_[s] * ubnd_[s];
        pau_[p + 1] = pau_[p] + slope_[s] * ubnd_[s];
      }
      return crossed;
    }
    ids_.assign(status_.begin() + lo, status_.begin() + hi + 1);
    for (int t = 0; t < g; ++t) {
      rank_[ids_[t]] = t;
      val_[ids_[t]] = line_value(ids_[t], lam);
    }
    std::sort(ids_.begin(), ids_.end(), [&](int x, int y) {
      if (val_[x] != val_[y]) return val_[x] > val_[y];
      if (slope_[x] != slope_[y]) return slope_[x] > slope_[y];
      return x < y;
    });
    seq_.resize(g);
    tmp_.resize(g);
    for (int t = 0; t < g; ++t) seq_[t] = rank_[ids_[t]];
    if (trace_) {
      for (int s = 0; s < g; ++s)
        for (int t = s + 1; t < g; ++t)
          if (seq_[s] > seq_[t])
            trace_(lam, std::min(ids_[s], ids_[t]),
                   std::max(ids_[s], ids_[t]), phi);
    }
    const long long crossed = count_inversions(0, g);
    for (int t = 0; t < g; ++t) {
      status_[lo + t] = ids_[t];
      pos_[ids_[t]] = lo + t;
    }
    for (int p = lo; p < hi; ++p) {
      const int id = status_[p];
      pu_[p + 1] = pu_[p] + ubnd_[id];
      pcu_[p + 1] = pcu_[p] + icept_[id] * ubnd_[id];
      pau_[p + 1] = pau_[p] + slope_[id] * ubnd_[id];
    }
    return crossed;
  }

  // Merge-sort inversion count of seq_[lo, hi).
  long long count_inversions(int lo, int hi) {
    if (hi - lo <= 1) return 0;
    const int mid = (lo + hi) / 2;
    long long cnt = count_inversions(lo, mid) + count_inversions(mid, hi);
    int i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
      if (seq_[i] <= seq_[j]) {
        tmp_[k++] = seq_[i++];
      } else {
        cnt += mid - i;
        tmp_[k++] = seq_[j++];
      }
    }
    while (i < mid) tmp_[k++] = seq_[i++];
    while (j < hi) tmp_[k++] = seq_[j++];
    std::copy(tmp_.begin() + lo, tmp_.begin() + hi, seq_.begin() + lo);
    return cnt;
  }

  void refresh_keys(int lo, int hi, double lam) {
    const int jlo = std::max(lo - 1, 0);
    const int jhi = std::min(hi, nlines_ - 2);
    for (int j = jlo; j <= jhi; ++j) {
      double k = boundary_cross(j);
      // A crossing that fails to clear the processed abscissa (an exact
      // re-tie, or a just-crossed pair detected one ulp late) is nudged
      // right so abscissas stay strictly increasing.
      if (k <= lam) k = std::nextafter(lam, kInf);
      if (k == key_[j]) continue;
      key_[j] = k;
      if (dirty_stamp_[j] != steps_) {
        dirty_stamp_[j] = steps_;
        dirty_.push_back(j);
      }
    }
  }

  // Fold the keys rewritten during the current step back into the heap.
  // Small batches sift one node at a time; once a batch is worth a fair
  // fraction of the heap, two linear passes (copy keys, then bottom-up
  // heapify) are cheaper and touch memory sequentially.
  void repair_heap() {
    if (dirty_.empty()) return;
    const int nb = static_cast<int>(heap_.size());
    if (static_cast<int>(dirty_.size()) >= nb / 4) {
      for (int s = 0; s < nb; ++s) heap_[s].key = key_[heap_[s].id];
      for (int i = nb >= 2 ? (nb - 2) / kArity : -1; i >= 0; --i) sift_down(i);
    } else {
      for (const int j : dirty_) update_key(j, key_[j]);
    }
    dirty_.clear();
  }

  static bool h_less(const Node& x, const Node& y) {
    if (x.key != y.key) return x.key < y.key;
    return x.id < y.id;
  }

  // Move node nd up from slot i to its resting place.
  void place_up(int i, Node nd) {
    while (i > 0) {
      const int p = (i - 1) / kArity;
      if (!h_less(nd, heap_[p])) break;
      heap_[i] = heap_[p];
      hpos_[heap_[i].id] = i;
      i = p;
    }
    heap_[i] = nd;
    hpos_[nd.id] = i;
  }

  // Move node nd down from slot i to its resting place.
  void place_down(int i, Node nd) {
    const int n = static_cast<int>(heap_.size());
    for (;;) {
      const int c0 = kArity * i + 1;
      if (c0 >= n) break;
      const int c1 = std::min(c0 + kArity, n);
      int best = c0;
      for (int c = c0 + 1; c < c1; ++c)
        if (h_less(heap_[c], heap_[best])) best = c;
      if (!h_less(heap_[best], nd)) break;
      heap_[i] = heap_[best];
      hpos_[heap_[i].id] = i;
      i = best;
    }
    heap_[i] = nd;
    hpos_[nd.id] = i;
  }

  void sift_up(int i) { place_up(i, heap_[i]); }
  void sift_down(int i) { place_down(i, heap_[i]); }

  void update_key(int j, double k) {
    const int slot = hpos_[j];
    const double old = heap_[slot].key;
    if (old == k) return;
    if (k < old)
      place_up(slot, {k, j});
    else
      place_down(slot, {k, j});
  }

  int nlines_;
  double b_;
  std::vector<double> slope_, icept_, ubnd_;  // indexed by line id
  std::vector<int> status_, pos_;             // mutually inverse permutations
  std::vector<double> pu_, pcu_, pau_;        // prefix sums over positions
  std::vector<double> key_;                   // boundary -> crossing abscissa
  std::vector<Node> heap_;                    // min-heap mirror of key_
  std::vector<int> hpos_;                     // boundary -> heap slot
  std::vector<long long> dirty_stamp_;        // step that last dirtied it
  long long crossings_ = 0, steps_ = 0;
  int steps_since_rebuild_ = 0;
  mutable int hint_ = 0;  // last merit crossover found by phi_at
  TraceFn trace_;
  // step() scratch
  std::vector<int> ids_, seq_, tmp_, rank_, work_, dfs_, dirty_;
  std::vector<double> val_;
};

inline SweepState init_sweep(const ReducedInstance& r) { return SweepState(r); }

/// Dual value from the maintained order; see SweepState::phi_at.
inline double phi_incremental(const SweepState& s, double lambda) {
  return s.phi_at(lambda);
}

/// Outcome of the event sweep: either a strict three-point bracket around
/// the dual maximizer, or the bookkeeping the expansion phase needs when no
/// bracket appeared (queue drained, plateau, or maximum outside the event
/// range).
struct Bracket {
  bool bracketed = false;
  double lo = 0.0, mid = 0.0, hi = 0.0;  // strict bracket when bracketed

  bool any_events = false;
  double lam_lb = 0.0;  // first processed abscissa
  double lam_ub = 0.0;  // last processed abscissa

  double best_phi = -std::numeric_limits<double>::infinity();
  double best_lambda = 0.0;  // first abscissa attaining best_phi
  double best_before = 0.0;  // processed abscissa preceding the best run
  double best_after = 0.0;   // processed abscissa following the best run

  long long crossings = 0;
  long long steps = 0;
};

/// Sweep events left to right, evaluating the dual at each abscissa, until
/// three consecutive values form a strict peak (return the bracket) or the
/// values start falling (concavity: nothing better lies ahead) or the queue
/// drains. Comparisons are exact on the computed values - a plateau never
/// produces a false bracket; the caller falls back on best_* instead.
///
/// Events landing on the double immediately adjacent to the previous one are
/// re-readings of the same abscissa (the queue nudges not-yet-crossed pairs
/// one ulp forward), not new samples: their value differs from the previous
/// one by rounding noise only, which on a steep rise would manufacture a fake
/// peak. They update the processed range but stay out of the peak test.
inline Bracket run_phase1(SweepState& sw) {
  Bracket out;
  double pp_lam = 0.0, pp_phi = 0.0;  // second-to-last sample
  double p_lam = 0.0, p_phi = 0.0;    // last sample
  double raw_lam = 0.0;               // last event abscissa, sampled or not
  long long nevents = 0;
  int seen = 0;
  bool after_pending = false;
  while (sw.has_events()) {
    const StepInfo ev = sw.step();
    out.any_events = true;
    if (nevents == 0) out.lam_lb = ev.lambda;
    out.lam_ub = ev.lambda;
    ++nevents;

    const double inf = std::numeric_limits<double>::infinity();
    if (nevents > 1 && ev.lambda <= std::nextafter(raw_lam, inf)) {
      raw_lam = ev.lambda;
      continue;
    }
    raw_lam = ev.lambda;

    if (ev.phi > out.best_phi) {
      out.best_phi = ev.phi;
      out.best_lambda = ev.lambda;
      out.best_before = seen ? p_lam : ev.lambda;
      out.best_after = ev.lambda;
      after_pending = true;
    } else if (ev.phi == out.best_phi) {
      out.best_after = ev.lambda;  // plateau run keeps extending
      after_pending = true;
    } else if (after_pending) {
      out.best_after = ev.lambda;  // first strictly lower sample after it
      after_pending = false;
    }

    if (seen >= 2 && p_phi > pp_phi && p_phi > ev.phi) {
      out.bracketed = true;
      out.lo = pp_lam;
      out.mid = p_lam;
      out.hi = ev.lambda;
      break;
    }
    const bool fell = seen >= 1 && ev.phi < p_phi;
    pp_lam = p_lam;
    pp_phi = p_phi;
    p_lam = ev.lambda;
    p_phi = ev.phi;
    ++seen;
    if (fell) break;  // concave: every remaining abscissa evaluates lower
  }
  out.crossings = sw.crossings();
  out.steps = sw.steps();
  return out;
}

inline Bracket run_phase1(const ReducedInstance& r) {
  SweepState sw(r);
  return run_phase1(sw);
}

}  // namespace rqkp
