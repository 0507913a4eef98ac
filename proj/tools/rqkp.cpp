// Command line front end for the rank-one quadratic knapsack solver:
// generate random instances, solve instance files, tabulate the dual
// function, run randomized self-checks, and benchmark.
//
// Exit codes:
//   0   success (solve: proven optimal)
//   2   solve finished near-optimal (tolerances not certified)
//   3   instance infeasible
//   1   verify found failures / bench had non-optimal solves
//   64  usage, flag, or input-file errors

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "rqkp/driver.hpp"
#include "rqkp/dual.hpp"
#include "rqkp/io.hpp"
#include "rqkp/toolkit.hpp"

namespace {

using namespace rqkp;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Empty path or "-" means stdout.
void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int cmd_gen(int type, int n, std::uint64_t seed, const std::string& out) {
  const GeneralInstance g = generate(
      {type == 1 ? InstanceType::TYPE_I : InstanceType::TYPE_II, n, seed});
  write_output(out, serialize_instance(g));
  return 0;
}

int cmd_solve(const std::string& input, const std::string& output,
              const std::string& trace_path, double feas_tol, double gap_tol) {
  const ParsedInstance parsed = parse_instance(read_file(input));

  SolveConfig cfg;
  cfg.tol.feasibility = feas_tol;
  cfg.tol.gap = gap_tol;
  std::string trace_csv = "lambda,i,j,phi\n";
  if (!trace_path.empty())
    cfg.trace = [&trace_csv](double lam, int i, int j, double phi) {
      trace_csv += format_double(lam) + ',' + std::to_string(i) + ',' +
                   std::to_string(j) + ',' + format_double(phi) + '\n';
    };

  const SolveReport rep =
      std::holds_alternative<GeneralInstance>(parsed)
          ? solve(std::get<GeneralInstance>(parsed), cfg)
          : solve_reduced(std::get<ReducedInstance>(parsed), cfg);

  if (!trace_path.empty()) write_output(trace_path, trace_csv);
  write_output(output, serialize_report(rep));
  switch (rep.status) {
    case Status::OPTIMAL: return 0;
    case Status::NEAR_OPTIMAL: return 2;
    default: return 3;
  }
}

int cmd_verify(int n_max, int trials, std::uint64_t seed,
               const std::string& type) {
  VerifyConfig cfg;
  cfg.n_max = n_max;
  cfg.trials = trials;
  cfg.seed = seed;
  if (type == "1")
    cfg.types = {InstanceType::TYPE_I};
  else if (type == "2")
    cfg.types = {InstanceType::TYPE_II};
  else
    cfg.types = {InstanceType::TYPE_I, InstanceType::TYPE_II};

  const VerifyOutcome out = verify_random(cfg);
  if (!out.ok()) {
    std::fputs(out.log.c_str(), stderr);
    std::fprintf(stderr, "%d of %d trials failed\n", out.failures, out.trials);
    return 1;
  }
  std::printf("verified %d trials (n <= %d): all checks passed\n", out.trials,
              n_max);
  return 0;
}

int cmd_bench(const std::vector<int>& sizes, int reps,
              const std::vector<int>& types, std::uint64_t seed, int jobs,
              const std::string& out) {
  BenchConfig cfg;
  cfg.sizes = sizes;
  cfg.reps = reps;
  cfg.types.clear();
  for (int t : types)
    cfg.types.push_back(t == 1 ? InstanceType::TYPE_I : InstanceType::TYPE_II);
  cfg.seed = seed;
  cfg.jobs = jobs;

  const std::vector<BenchRow> rows = bench(cfg);
  write_output(out, bench_csv(rows));
  std::fputs(bench_summary(rows).c_str(), stderr);
  return all_optimal(rows) ? 0 : 1;
}

int cmd_phi_scan(const std::string& input, double from, double to, int points,
                 const std::string& out) {
  const ParsedInstance parsed = parse_instance(read_file(input));
  const ReducedInstance r = strip_collapsed(
      std::holds_alternative<GeneralInstance>(parsed)
          ? reduce(std::get<GeneralInstance>(parsed))
          : std::get<ReducedInstance>(parsed));

  std::string csv = "lambda,phi,piece\n";
  for (int i = 0; i < points; ++i) {
    const double lam =
        points == 1 ? from : from + (to - from) * i / (points - 1);
    const DualEval ev = eval_phi(r, lam);
    csv += format_double(lam) + ',' + format_double(ev.phi) + ',' +
           piece_name(ev.piece) + '\n';
  }
  write_output(out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-one quadratic knapsack toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a random instance file");
  int gtype = 1, gn = 1;
  std::uint64_t gseed = 0;
  std::string gout;
  gen->add_option("--type", gtype, "instance family (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  gen->add_option("--n", gn, "number of variables")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gseed, "generator seed");
  gen->add_option("--out", gout, "output file (default: stdout)");

  auto* solve_cmd = app.add_subcommand("solve", "solve an instance file");
  std::string sin, sout, strace;
  double sfeas = 1e-9, sgap = 1e-6;
  solve_cmd->add_option("--input", sin, "instance file (JSON)")->required();
  solve_cmd->add_option("--output", sout, "report file (default: stdout)");
  solve_cmd->add_option("--trace-events", strace,
                        "write processed crossings to this CSV file");
  solve_cmd->add_option("--feas-tol", sfeas, "relative feasibility tolerance");
  solve_cmd->add_option("--gap-tol", sgap, "relative duality-gap tolerance");

  auto* verify_cmd =
      app.add_subcommand("verify", "randomized self-check against oracles");
  int vmax = 8, vtrials = 100;
  std::uint64_t vseed = 0;
  std::string vtype = "mixed";
  verify_cmd->add_option("--n-max", vmax, "largest instance size (<= 12)")
      ->check(CLI::Range(1, 12));
  verify_cmd->add_option("--trials", vtrials, "number of random trials")
      ->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--seed", vseed, "master seed");
  verify_cmd->add_option("--type", vtype, "instance family: 1, 2, or mixed")
      ->check(CLI::IsMember({"1", "2", "mixed"}));

  auto* bench_cmd =
      app.add_subcommand("bench", "time the solver on generated instances");
  std::vector<int> bsizes;
  std::vector<int> btypes{1, 2};
  int breps = 1, bjobs = 1;
  std::uint64_t bseed = 0;
  std::string bout;
  bench_cmd->add_option("--sizes", bsizes, "comma-separated instance sizes")
      ->delimiter(',')
      ->required()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", breps, "repetitions per size and type")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--types", btypes, "instance families (default 1,2)")
      ->delimiter(',')
      ->check(CLI::IsMember({1, 2}));
  bench_cmd->add_option("--seed", bseed, "master seed");
  bench_cmd->add_option("--jobs", bjobs, "worker threads")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bout, "CSV output file (default: stdout)");

  auto* scan_cmd =
      app.add_subcommand("phi-scan", "tabulate the dual function on a grid");
  std::string pin, pout;
  double pfrom = 0.0, pto = 0.0;
  int ppoints = 101;
  scan_cmd->add_option("--input", pin, "instance file (JSON)")->required();
  scan_cmd->add_option("--from", pfrom, "first grid value")->required();
  scan_cmd->add_option("--to", pto, "last grid value")->required();
  scan_cmd->add_option("--points", ppoints, "number of grid values")
      ->check(CLI::PositiveNumber);
  scan_cmd->add_option("--out", pout, "CSV output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (*gen) return cmd_gen(gtype, gn, gseed, gout);
    if (*solve_cmd) return cmd_solve(sin, sout, strace, sfeas, sgap);
    if (*verify_cmd) return cmd_verify(vmax, vtrials, vseed, vtype);
    if (*bench_cmd) return cmd_bench(bsizes, breps, btypes, bseed, bjobs, bout);
    if (*scan_cmd) return cmd_phi_scan(pin, pfrom, pto, ppoints, pout);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 64;
  }
  return 64;
}
