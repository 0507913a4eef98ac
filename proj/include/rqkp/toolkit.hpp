#pragma once

// Instance generator and benchmark harness.
//
// generate() draws the two standard random families:
//
//   type 1:  a_i integral in [-50, 50] \ {0},  c_i integral in [-50, 50]
//   type 2:  a_i integral in [1, 50],          c_i integral in [-50, -1]
//
// with, for both, l_i integral in [0, 20], width u_i - l_i integral in
// [1, 100], unit rank-one weights q = 1, and right-hand side
//
//   b = round( a'(l + theta o (u - l)) ),   theta_i uniform in [0, 1),
//
// the constraint value at a random box point. All coefficients being
// integral, the attainable range of a'x has integral endpoints, so the
// rounding cannot leave it: every generated instance is feasible by
// construction.
//
// The draw order is part of the contract: all of a (index ascending), then
// all of c, the lower bounds, the widths, and finally the placement
// fractions theta. Together with the fixed generator in rng.hpp this makes
// instances byte-identical across platforms for a given (type, n, seed).
//
// bench() solves a deterministic grid of generated instances -- row order
// is size-major, then type, then repetition, with per-row seeds derived
// from the master seed and those coordinates -- and reports one CSV row per
// solve. Worker threads (jobs > 1) only change timings, never row content
// or order: rows are indexed up front and each worker writes its own slots.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rqkp/driver.hpp"
#include "rqkp/model.hpp"
#include "rqkp/oracle.hpp"
#include "rqkp/rng.hpp"

namespace rqkp {

enum class InstanceType : int { TYPE_I = 1, TYPE_II = 2 };

struct GenSpec {
  InstanceType type = InstanceType::TYPE_I;
  int n = 1;
  std::uint64_t seed = 0;
};

inline GeneralInstance generate(const GenSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("generator needs n >= 1");
  const int n = spec.n;
  SeededRng rng(spec.seed);

  GeneralInstance g;
  g.n = n;
  g.q.assign(n, 1.0);
  g.a.resize(n);
  g.c.resize(n);
  g.l.resize(n);
  g.u.resize(n);

  if (spec.type == InstanceType::TYPE_I) {
    for (int i = 0; i < n; ++i) {
      long long v = 0;
      do v = rng.uniform_int(-50, 50); while (v == 0);
      g.a[i] = static_cast<double>(v);
    }
    for (int i = 0; i < n; ++i)
      g.c[i] = static_cast<double>(rng.uniform_int(-50, 50));
  } else {
    for (int i = 0; i < n; ++i)
      g.a[i] = static_cast<double>(rng.uniform_int(1, 50));
    for (int i = 0; i < n; ++i)
      g.c[i] = static_cast<double>(rng.uniform_int(-50, -1));
  }
  for (int i = 0; i < n; ++i)
    g.l[i] = static_cast<double>(rng.uniform_int(0, 20));
  for (int i = 0; i < n; ++i)
    g.u[i] = g.l[i] + static_cast<double>(rng.uniform_int(1, 100));

  double at_point = 0.0;
  for (int i = 0; i < n; ++i)
    at_point += g.a[i] * (g.l[i] + rng.uniform01() * (g.u[i] - g.l[i]));
  g.b = std::round(at_point);
  return g;
}

// ---------------------------------------------------------------------------
// Benchmark grid

struct BenchRow {
  int n = 0;
  InstanceType type = InstanceType::TYPE_I;
  std::uint64_t seed = 0;
  double time_ms = 0.0;  // wall time of the solve, always >= 0
  long long events = 0;
  int phase = 0;
  double objective = 0.0;
  double gap = 0.0;  // clamped at zero: sub-tolerance duality noise
  Status status = Status::INFEASIBLE;  // harness gate; not serialized
};

struct BenchConfig {
  std::vector<int> sizes;
  int reps = 1;
  std::vector<InstanceType> types{InstanceType::TYPE_I, InstanceType::TYPE_II};
  std::uint64_t seed = 0;
  int jobs = 1;  // worker threads; row content and order stay fixed
};

inline std::vector<BenchRow> bench(const BenchConfig& cfg) {
  struct Job {
    int n = 0;
    InstanceType type = InstanceType::TYPE_I;
    int rep = 0;
  };
  std::vector<Job> grid;
  for (int n : cfg.sizes)
    for (InstanceType t : cfg.types)
      for (int rep = 0; rep < cfg.reps; ++rep) grid.push_back({n, t, rep});

  std::vector<BenchRow> rows(grid.size());
  auto run_one = [&](std::size_t i) {
    const Job& job = grid[i];
    const std::uint64_t seed =
        derive_seed(cfg.seed, static_cast<std::uint64_t>(job.n),
                    static_cast<std::uint64_t>(static_cast<int>(job.type)),
                    static_cast<std::uint64_t>(job.rep));
    const SolveReport rep = solve(generate({job.type, job.n, seed}));
    BenchRow& row = rows[i];
    row.n = job.n;
    row.type = job.type;
    row.seed = seed;
    row.time_ms = rep.time_ms;
    row.events = rep.events_processed;
    row.phase = rep.phase;
    row.objective = rep.objective;
    row.gap = std::max(0.0, rep.gap);
    row.status = rep.status;
  };

  int workers = cfg.jobs < 1 ? 1 : cfg.jobs;
  if (static_cast<std::size_t>(workers) > grid.size())
    workers = static_cast<int>(grid.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < grid.size();
             i = next.fetch_add(1))
          run_one(i);
      });
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

inline constexpr const char* kBenchCsvHeader =
    "n,type,seed,time_ms,events,phase,objective,gap";

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out(kBenchCsvHeader);
  out += '\n';
  for (const BenchRow& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(static_cast<int>(r.type));
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_double(r.time_ms);
    out += ',';
    out += std::to_string(r.events);
    out += ',';
    out += std::to_string(r.phase);
    out += ',';
    out += format_double(r.objective);
    out += ',';
    out += format_double(r.gap);
    out += '\n';
  }
  return out;
}

/// Per-(size, type) means plus a one-line total; meant for a progress
/// stream, not for the CSV file.
inline std::string bench_summary(const std::vector<BenchRow>& rows) {
  std::string out;
  std::size_t i = 0;
  int non_optimal = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    double time_sum = 0.0, event_sum = 0.0, gap_max = 0.0;
    while (j < rows.size() && rows[j].n == rows[i].n &&
           rows[j].type == rows[i].type) {
      time_sum += rows[j].time_ms;
      event_sum += static_cast<double>(rows[j].events);
      gap_max = std::max(gap_max, rows[j].gap);
      if (rows[j].status != Status::OPTIMAL) ++non_optimal;
      ++j;
    }
    const double k = static_cast<double>(j - i);
    out += "n=" + std::to_string(rows[i].n);
    out += " type=" + std::to_string(static_cast<int>(rows[i].type));
    out += " solves=" + std::to_string(j - i);
    out += " mean_time_ms=" + format_double(time_sum / k);
    out += " mean_events=" + format_double(event_sum / k);
    out += " max_gap=" + format_double(gap_max);
    out += '\n';
    i = j;
  }
  out += std::to_string(rows.size()) + " solves, " +
         std::to_string(non_optimal) + " not optimal\n";
  return out;
}

inline bool all_optimal(const std::vector<BenchRow>& rows) {
  for (const BenchRow& r : rows)
    if (r.status != Status::OPTIMAL) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Randomized self-check

struct VerifyConfig {
  int n_max = 8;  // exhaustive cross-check limit; must stay within [1, 12]
  int trials = 100;
  std::uint64_t seed = 0;
  std::vector<InstanceType> types{InstanceType::TYPE_I, InstanceType::TYPE_II};
};

struct VerifyOutcome {
  int trials = 0;
  int failures = 0;
  std::string log;  // one line per failed trial
  bool ok() const { return failures == 0; }
};

/// Cross-check the full pipeline against the exhaustive enumeration oracle
/// on small random instances, and the closed-form box solver against its
/// greedy counterpart on the same data. Deterministic in the config.
inline VerifyOutcome verify_random(const VerifyConfig& cfg) {
  if (cfg.n_max < 1 || cfg.n_max > 12)
    throw std::invalid_argument("cross-check size must lie in [1, 12]");
  if (cfg.types.empty())
    throw std::invalid_argument("need at least one instance type");

  VerifyOutcome out;
  for (int t = 0; t < cfg.trials; ++t) {
    const InstanceType type = cfg.types[t % cfg.types.size()];
    SeededRng pick(derive_seed(cfg.seed, static_cast<std::uint64_t>(t), 0));
    const int n = static_cast<int>(pick.uniform_int(1, cfg.n_max));
    const GeneralInstance g = generate(
        {type, n, derive_seed(cfg.seed, static_cast<std::uint64_t>(t), 1)});
    const ReducedInstance r = reduce(g);
    const SolveReport rep = solve(g);
    ++out.trials;

    std::string why;
    if (rep.status != Status::OPTIMAL)
      why = std::string("status ") + status_name(rep.status);
    if (why.empty()) {
      const oracle::OracleResult want = oracle::kkt_enumerate(r);
      const double target = want.objective + r.offset;
      if (std::fabs(rep.objective - target) > scaled_tol(1e-6, target))
        why = "objective " + format_double(rep.objective) + " vs oracle " +
              format_double(target);
    }
    if (why.empty()) {
      const std::vector<double> y = map_to_reduced(r, rep.x);
      const double resid = dot(r.a, y) - r.b;
      if (std::fabs(resid) > scaled_tol(1e-9, r.b))
        why = "constraint residual " + format_double(resid);
    }
    for (int i = 0; i < g.n && why.empty(); ++i)
      if (rep.x[i] < g.l[i] - scaled_tol(1e-9, g.u[i]) ||
          rep.x[i] > g.u[i] + scaled_tol(1e-9, g.u[i]))
        why = "x[" + std::to_string(i) + "] outside its box";
    if (why.empty()) {
      const BoundedSolution box = solve_bounded(r.c, r.u);
      const oracle::OracleResult greedy = oracle::greedy_s_oracle(r.c, r.u);
      if (std::fabs(box.objective - greedy.objective) >
          scaled_tol(1e-9, greedy.objective))
        why = "box solver " + format_double(box.objective) + " vs greedy " +
              format_double(greedy.objective);
    }

    if (!why.empty()) {
      ++out.failures;
      out.log += "trial " + std::to_string(t) + " (type " +
                 std::to_string(static_cast<int>(type)) + ", n " +
                 std::to_string(n) + "): " + why + "\n";
    }
  }
  return out;
}

}  // namespace rqkp
