#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rqkp/bounded.hpp"
#include "rqkp/oracle.hpp"
#include "rqkp/rng.hpp"

using namespace rqkp;

namespace {

struct BoxInstance {
  std::vector<double> c, u;
};

BoxInstance random_box(SeededRng& rng, int n, bool integral = false) {
  BoxInstance t;
  t.c.resize(n);
  t.u.resize(n);
  for (int i = 0; i < n; ++i) {
    if (integral) {
      t.c[i] = (double)rng.uniform_int(-10, 10);
      t.u[i] = (double)rng.uniform_int(1, 8);
    } else {
      t.c[i] = rng.uniform(-10.0, 10.0);
      t.u[i] = rng.uniform(0.05, 5.0);
    }
    if (rng.uniform_int(0, 9) == 0) t.u[i] = 0.0;  // occasional collapsed box
    if (n > 1 && rng.uniform_int(0, 5) == 0) t.c[i] = t.c[0];  // cost ties
  }
  return t;
}

int interior_count(const std::vector<double>& x, const std::vector<double>& u,
                   double tol) {
  int k = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > tol && x[i] < u[i] - tol) ++k;
  return k;
}

// First-order optimality for min ½(1'x)² − c'x over the box: with s = 1'x,
// a coordinate at 0 needs s ≥ c_i, at u_i needs s ≤ c_i, interior needs s = c_i.
void check_first_order(const std::vector<double>& x,
                       const std::vector<double>& c,
                       const std::vector<double>& u) {
  const double s = vec_sum(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double tol = 1e-9 * (1.0 + std::fabs(c[i]) + std::fabs(s));
    INFO("coordinate " << i << ", s=" << s << ", c_i=" << c[i]);
    REQUIRE(x[i] >= -1e-12);
    REQUIRE(x[i] <= u[i] + 1e-12);
    const bool at_lo = x[i] <= 1e-12;
    const bool at_hi = x[i] >= u[i] - 1e-12;
    if (at_lo && at_hi) continue;  // collapsed coordinate, nothing to check
    if (at_lo)
      CHECK(s >= c[i] - tol);
    else if (at_hi)
      CHECK(s <= c[i] + tol);
    else
      CHECK(std::fabs(s - c[i]) <= tol);
  }
}

}  // namespace

TEST_CASE("f_eval computes half-square-sum minus linear term") {
  CHECK(f_eval({0, 0}, {5, 3}) == 0.0);
  CHECK(f_eval({2, 1}, {5, 3}) == -8.5);
  CHECK(f_eval({2, 4}, {0, 0}) == 18.0);  // x = u, zero costs
}

TEST_CASE("merit values follow the prefix formula") {
  {
    const SortedView v = build_sorted_view({5, 3}, {2, 4});
    CHECK(compute_G(v) == std::vector<double>{-4, 1});
  }
  {
    const SortedView v = build_sorted_view({1}, {4});
    CHECK(compute_G(v) == std::vector<double>{1});
  }
  {
    const SortedView v = build_sorted_view({10, 9}, {2, 2});
    CHECK(compute_G(v) == std::vector<double>{-9, -6});
  }
}

TEST_CASE("find_nbar locates the first non-negative merit value") {
  CHECK(find_nbar({-4, 1}) == 2);
  CHECK(find_nbar({1}) == 1);
  CHECK_FALSE(find_nbar({-9, -6}).has_value());
}

TEST_CASE("solve_bounded: crossover between two candidates") {
  const BoundedSolution s = solve_bounded({5, 3}, {2, 4});
  REQUIRE(s.nbar.has_value());
  CHECK(*s.nbar == 2);
  CHECK(s.delta1 == 2.0);
  CHECK(s.delta2 == 1.0);
  CHECK(s.f_xbar == -8.0);
  CHECK(s.f_xtilde == -8.5);
  CHECK(s.candidate == Candidate::XTILDE);
  CHECK(s.x == std::vector<double>{2, 1});
  CHECK(s.objective == -8.5);
}

TEST_CASE("solve_bounded: non-positive costs stay at zero") {
  const BoundedSolution s = solve_bounded({-1, -2}, {5, 5});
  CHECK(s.x == std::vector<double>{0, 0});
  CHECK(s.objective == 0.0);
  CHECK_FALSE(s.nbar.has_value());
}

TEST_CASE("solve_bounded: all merit values negative saturates the box") {
  const BoundedSolution s = solve_bounded({10, 9}, {2, 2});
  CHECK_FALSE(s.nbar.has_value());
  CHECK(s.delta2 == 2.0);
  CHECK(s.x == std::vector<double>{2, 2});
  CHECK(s.objective == -30.0);
}

TEST_CASE("solve_bounded: first coordinate absorbs everything") {
  const BoundedSolution s = solve_bounded({1, 0.5}, {4, 4});
  REQUIRE(s.nbar.has_value());
  CHECK(*s.nbar == 1);
  CHECK(s.delta2 == 1.0);
  CHECK(s.x == std::vector<double>{1, 0});
  CHECK(s.objective == -0.5);
}

TEST_CASE("solve_bounded: coinciding candidates tie cleanly") {
  // delta1 = u_1 and delta2 = 0 hold at once; both candidates are the point
  // (2,0) and the reported values must agree exactly.
  const BoundedSolution s = solve_bounded({4, 2}, {2, 4});
  REQUIRE(s.nbar.has_value());
  CHECK(*s.nbar == 2);
  CHECK(s.delta1 == 2.0);
  CHECK(s.delta2 == 0.0);
  CHECK(s.f_xbar == s.f_xtilde);
  CHECK(s.x == std::vector<double>{2, 0});
  CHECK(s.objective == -6.0);
}

TEST_CASE("solve_bounded: cost ties broken by original index") {
  const BoundedSolution s = solve_bounded({3, 3, 3}, {1, 1, 1});
  CHECK(s.x == std::vector<double>{1, 1, 1});
  CHECK(s.objective == -4.5);
}

TEST_CASE("filling one more prefix coordinate changes f by u*G") {
  SeededRng rng(991);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + (int)rng.uniform_int(0, 39);
    const BoxInstance t = random_box(rng, n);
    const SortedView v = build_sorted_view(t.c, t.u);
    const std::vector<double> G = compute_G(v);
    std::vector<double> x(n, 0.0);
    double f_prev = 0.0;
    for (int k = 0; k < v.m; ++k) {
      x[v.order[k]] = v.u[k];
      const double f_next = f_eval(x, t.c);
      const double predicted = v.u[k] * G[k];
      CHECK(std::fabs((f_next - f_prev) - predicted) <=
            1e-9 * (1.0 + std::fabs(f_next)));
      f_prev = f_next;
    }
  }
}

TEST_CASE("merit values are strictly increasing on every active view") {
  SeededRng rng(1213);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + (int)rng.uniform_int(0, 39);
    const bool integral = trial % 2 == 0;
    const BoxInstance t = random_box(rng, n, integral);
    const SortedView v = build_sorted_view(t.c, t.u);
    const std::vector<double> G = compute_G(v);
    for (int k = 0; k + 1 < v.m; ++k) {
      if (integral)
        CHECK(G[k + 1] - G[k] > 0.0);  // exact with integer data
      else
        CHECK(G[k + 1] - G[k] > -1e-12);
    }
  }
}

TEST_CASE("solve_bounded matches the greedy oracle and keeps support small") {
  SeededRng rng(31337);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + (int)rng.uniform_int(0, 11);
    const BoxInstance t = random_box(rng, n, trial % 3 == 0);
    const BoundedSolution s = solve_bounded(t.c, t.u);
    const oracle::OracleResult o = oracle::greedy_s_oracle(t.c, t.u);
    INFO("trial " << trial << " n=" << n);
    CHECK(std::fabs(s.objective - o.objective) <=
          1e-9 * (1.0 + std::fabs(o.objective)));
    CHECK(std::fabs(f_eval(s.x, t.c) - s.objective) <=
          1e-9 * (1.0 + std::fabs(s.objective)));
    CHECK(interior_count(s.x, t.u, 1e-12) <= 1);
    check_first_order(s.x, t.c, t.u);
  }
}

TEST_CASE("integer data yields integral solutions in the flat-crossover regime") {
  SeededRng rng(777);
  int covered = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + (int)rng.uniform_int(0, 7);
    const BoxInstance t = random_box(rng, n, true);
    const BoundedSolution s = solve_bounded(t.c, t.u);
    const SortedView v = build_sorted_view(t.c, t.u);

    bool expect_integral = false;
    if (!s.nbar.has_value()) {
      expect_integral = true;  // last-coordinate lift is min of two integers
    } else if (*s.nbar == 1) {
      expect_integral = true;  // min{c_1, u_1} of integers
    } else {
      const int nb = *s.nbar - 1;  // 0-based
      if (v.c[nb] <= v.prefix_u[nb] && v.prefix_u[nb] <= v.c[nb - 1])
        expect_integral = true;
    }
    if (!expect_integral) continue;
    ++covered;
    for (double xi : s.x) CHECK(xi == std::floor(xi));
  }
  CHECK(covered > 200);  // the regime actually occurs
}

TEST_CASE("winning candidate is consistent with the boundary shortcuts") {
  SeededRng rng(4242);
  int shortcut1 = 0, shortcut2 = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 2 + (int)rng.uniform_int(0, 8);
    const BoxInstance t = random_box(rng, n, trial % 2 == 0);
    const BoundedSolution s = solve_bounded(t.c, t.u);
    if (!s.nbar.has_value() || *s.nbar < 2) continue;
    const SortedView v = build_sorted_view(t.c, t.u);
    const int nb = *s.nbar - 1;  // 0-based position
    const double tol = 1e-9 * (1.0 + std::fabs(s.objective));
    if (s.delta1 == v.u[nb - 1]) {
      CHECK(s.f_xtilde <= s.f_xbar + tol);
      ++shortcut1;
    }
    if (s.delta2 == 0.0) {
      CHECK(s.f_xbar <= s.f_xtilde + tol);
      ++shortcut2;
    }
  }
  CHECK(shortcut1 > 50);
  CHECK(shortcut2 > 50);
}
