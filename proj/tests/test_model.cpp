#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <variant>

#include "rqkp/io.hpp"
#include "rqkp/model.hpp"
#include "rqkp/rng.hpp"

using namespace rqkp;

namespace {

GeneralInstance random_general(SeededRng& rng, int n) {
  GeneralInstance g;
  g.n = n;
  g.q.resize(n);
  g.a.resize(n);
  g.c.resize(n);
  g.l.resize(n);
  g.u.resize(n);
  for (int i = 0; i < n; ++i) {
    do {
      g.q[i] = rng.uniform(-3.0, 3.0);
    } while (std::fabs(g.q[i]) < 0.1);
    g.a[i] = rng.uniform(-5.0, 5.0);
    g.c[i] = rng.uniform(-10.0, 10.0);
    g.l[i] = rng.uniform(-4.0, 4.0);
    g.u[i] = g.l[i] + rng.uniform(0.0, 6.0);
  }
  g.b = rng.uniform(-10.0, 10.0);
  return g;
}

std::vector<double> random_box_point(SeededRng& rng, const GeneralInstance& g) {
  std::vector<double> x(g.n);
  for (int i = 0; i < g.n; ++i)
    x[i] = g.l[i] + rng.uniform01() * (g.u[i] - g.l[i]);
  return x;
}

}  // namespace

TEST_CASE("reduce keeps an already-reduced instance unchanged") {
  GeneralInstance g;
  g.n = 2;
  g.q = {1, 1};
  g.a = {1, 2};
  g.b = 3;
  g.c = {4, 5};
  g.l = {0, 0};
  g.u = {6, 7};
  const ReducedInstance r = reduce(g);
  REQUIRE(r.n == 2);
  CHECK(r.a == g.a);
  CHECK(r.c == g.c);
  CHECK(r.u == g.u);
  CHECK(r.b == 3.0);
  CHECK(r.offset == 0.0);
  CHECK(r.shift == std::vector<double>{0, 0});
  CHECK(r.scale == std::vector<double>{1, 1});
}

TEST_CASE("reduce rescales, flips negative factors and shifts bounds away") {
  GeneralInstance g;
  g.n = 2;
  g.q = {2, -1};
  g.a = {4, 3};
  g.b = 1;
  g.c = {6, 2};
  g.l = {0, 0};
  g.u = {1, 2};
  const ReducedInstance r = reduce(g);
  REQUIRE(r.n == 2);
  CHECK(r.a == std::vector<double>{2, -3});
  CHECK(r.c == std::vector<double>{5, 0});
  CHECK(r.u == std::vector<double>{2, 2});
  CHECK(r.b == -5.0);
  CHECK(r.offset == -2.0);
  CHECK(r.shift == std::vector<double>{0, -2});

  SECTION("back_transform undoes the change of variables") {
    BoxSolution y;
    y.x = {0, 2};
    y.objective = reduced_objective(r, y.x);
    const SolveReport rep = back_transform(r, y, 0.25);
    CHECK(rep.x == std::vector<double>{0, 0});
    CHECK(rep.lambda == 0.25);
    CHECK_THAT(rep.objective,
               Catch::Matchers::WithinAbs(general_objective(g, rep.x), 1e-12));
  }
}

TEST_CASE("reduced and general objectives agree on mapped points") {
  SeededRng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const GeneralInstance g = random_general(rng, 1 + (int)rng.uniform_int(0, 5));
    const ReducedInstance r = reduce(g);
    const std::vector<double> x = random_box_point(rng, g);
    const std::vector<double> y = map_to_reduced(r, x);
    for (int j = 0; j < r.n; ++j) {
      CHECK(y[j] >= -1e-9);
      CHECK(y[j] <= r.u[j] + 1e-9);
    }
    const double go = general_objective(g, x);
    const double ro = reduced_objective(r, y) + r.offset;
    CHECK_THAT(ro, Catch::Matchers::WithinAbs(go, 1e-10 * (1.0 + std::fabs(go))));
  }
}

TEST_CASE("reduce rejects invalid data") {
  GeneralInstance g;
  g.n = 2;
  g.q = {1, 0};
  g.a = {1, 1};
  g.b = 0;
  g.c = {1, 1};
  g.l = {0, 0};
  g.u = {1, 1};
  try {
    reduce(g);
    FAIL("expected ZeroRankFactor");
  } catch (const ZeroRankFactor& e) {
    CHECK(e.index == 1);
  }

  g.q = {1, 1};
  g.l = {0, 2};
  g.u = {1, 1};
  try {
    reduce(g);
    FAIL("expected BadBounds");
  } catch (const BadBounds& e) {
    CHECK(e.index == 1);
  }
}

TEST_CASE("collapsed variables are dropped and pinned") {
  GeneralInstance g;
  g.n = 3;
  g.q = {1, -2, 1};
  g.a = {1, 1, 1};
  g.b = 2;
  g.c = {3, 4, 5};
  g.l = {0, 1.5, 0};
  g.u = {2, 1.5, 2};  // middle variable is fixed at 1.5
  const ReducedInstance r = reduce(g);
  REQUIRE(r.n == 2);
  CHECK(r.kept == std::vector<int>{0, 2});

  BoxSolution y;
  y.x = {0.5, 1.0};
  y.objective = reduced_objective(r, y.x);
  const SolveReport rep = back_transform(r, y, 0.0);
  REQUIRE(rep.x.size() == 3);
  CHECK_THAT(rep.x[1], Catch::Matchers::WithinAbs(1.5, 1e-12));
  CHECK_THAT(rep.objective,
             Catch::Matchers::WithinAbs(general_objective(g, rep.x), 1e-9));
}

TEST_CASE("feasibility_check matches the attainable range of a'y") {
  ReducedInstance r;
  r.n = 2;
  r.a = {1, 1};
  r.c = {0, 0};
  r.u = {1, 1};

  r.b = 2.0;  // boundary: attainable
  CHECK(feasibility_check(r));
  r.b = 3.0;
  CHECK_FALSE(feasibility_check(r));

  r.a = {1, -1};
  r.b = -1.0;
  CHECK(feasibility_check(r));
  r.b = -1.5;
  CHECK(feasibility_check(r) == false);
  r.b = 1.5;
  CHECK(feasibility_check(r) == false);
}

TEST_CASE("feasibility_check agrees with exhaustive corner enumeration") {
  SeededRng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + (int)rng.uniform_int(0, 7);
    ReducedInstance r;
    r.n = n;
    r.a.resize(n);
    r.c.assign(n, 0.0);
    r.u.resize(n);
    for (int i = 0; i < n; ++i) {
      r.a[i] = rng.uniform(-3.0, 3.0);
      r.u[i] = rng.uniform(0.1, 2.0);
    }
    double lo = 0.0, hi = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        if (mask & (1 << i)) s += r.a[i] * r.u[i];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    r.b = rng.uniform(lo - 1.0, hi + 1.0);
    const bool expect = r.b >= lo - 1e-9 && r.b <= hi + 1e-9;
    if (std::fabs(r.b - lo) > 1e-6 && std::fabs(r.b - hi) > 1e-6)
      CHECK(feasibility_check(r) == expect);
  }
}

TEST_CASE("instance files round-trip exactly") {
  SeededRng rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    const GeneralInstance g = random_general(rng, 1 + (int)rng.uniform_int(0, 6));
    const std::string text = serialize_instance(g);
    const ParsedInstance p = parse_instance(text);
    REQUIRE(std::holds_alternative<GeneralInstance>(p));
    const auto& g2 = std::get<GeneralInstance>(p);
    CHECK(g2.n == g.n);
    CHECK(g2.q == g.q);  // bit-exact
    CHECK(g2.a == g.a);
    CHECK(g2.b == g.b);
    CHECK(g2.c == g.c);
    CHECK(g2.l == g.l);
    CHECK(g2.u == g.u);
    CHECK(serialize_instance(g2) == text);
  }
}

TEST_CASE("reduced-form files round-trip exactly") {
  ReducedInstance r;
  r.n = 2;
  r.a = {0.1, -2.7};
  r.b = 1.0 / 3.0;
  r.c = {5.5, 1e-7};
  r.u = {2, 3};
  const std::string text = serialize_instance(r);
  const ParsedInstance p = parse_instance(text);
  REQUIRE(std::holds_alternative<ReducedInstance>(p));
  const auto& r2 = std::get<ReducedInstance>(p);
  CHECK(r2.a == r.a);
  CHECK(r2.b == r.b);
  CHECK(r2.c == r.c);
  CHECK(r2.u == r.u);
  CHECK(r2.scale == std::vector<double>{1, 1});
  CHECK(r2.offset == 0.0);
}

TEST_CASE("parse_instance reports the offending field") {
  try {
    parse_instance(R"({"form":"general","n":1,"q":[1],"a":[1],"c":[1],"l":[0],"u":[1]})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field == "b");
  }
  try {
    parse_instance(R"({"form":"reduced","n":2,"a":[1,2],"b":0,"c":[1],"u":[1,1]})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.field == "c");
  }
  CHECK_THROWS_AS(parse_instance("not json at all"), ParseError);
  CHECK_THROWS_AS(parse_instance(R"({"form":"other","n":1})"), ParseError);
}

TEST_CASE("reports round-trip exactly") {
  SolveReport rep;
  rep.status = Status::NEAR_OPTIMAL;
  rep.x = {0.25, 1e-17, -0.125};
  rep.objective = -123.456789012345678;
  rep.lambda = 0.7;
  rep.gap = 3.5e-9;
  rep.phase = 2;
  rep.events_processed = 1234567890123LL;
  rep.time_ms = 17.25;
  const std::string text = serialize_report(rep);
  const SolveReport r2 = parse_report(text);
  CHECK(r2.status == rep.status);
  CHECK(r2.x == rep.x);
  CHECK(r2.objective == rep.objective);
  CHECK(r2.lambda == rep.lambda);
  CHECK(r2.gap == rep.gap);
  CHECK(r2.phase == rep.phase);
  CHECK(r2.events_processed == rep.events_processed);
  CHECK(r2.time_ms == rep.time_ms);
  CHECK(serialize_report(r2) == text);
}
