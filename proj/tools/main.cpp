// Command-line front end: solve instances, generate instances, run the
// elicitation checkers, reproduce benchmark tables, verify solutions.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svipha/instances.hpp"
#include "svipha/json_io.hpp"
#include "svipha/oracle.hpp"
#include "svipha/pha.hpp"

namespace {

using namespace svipha;

struct SolveOptions {
  std::string instance_path;
  double r = 1.0;
  std::optional<double> s;
  double rho = 1.618;
  double tol = 1e-5;
  int max_iter = 2000;
  int threads = 1;
  std::string out_path;
  std::string history_path;
  std::string format = "text";
};

PhaConfig make_config(const SolveOptions& opt) {
  PhaConfig cfg;
  cfg.r = opt.r;
  cfg.s = opt.s;
  cfg.rho = opt.rho;
  cfg.tol = opt.tol;
  cfg.max_iter = opt.max_iter;
  cfg.threads = opt.threads;
  return cfg;
}

int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return 0;
    case SolveStatus::MaxIters: return 1;
    case SolveStatus::InnerFailure: return 3;
  }
  return 3;
}

int run_solve(const SolveOptions& opt) {
  SviProblem problem = load_instance(opt.instance_path);
  PhaConfig cfg = make_config(opt);
  cfg.validate();
  SolveReport report = pha_solve(problem, cfg);

  const int n1 = problem.slcp ? problem.slcp->n1 : problem.space->decision_dim();
  if (opt.format == "json") {
    std::cout << report_to_json(report, n1).dump(2) << "\n";
  } else if (opt.format == "csv") {
    std::printf("iteration,err,rs_norm\n");
    for (std::size_t k = 0; k < report.error_history.size(); ++k)
      std::printf("%zu,%.17g,%.17g\n", k + 1, report.error_history[k],
                  k < report.rs_norm_history.size() ? report.rs_norm_history[k]
                                                    : 0.0);
  } else {
    std::printf("%s %d %.6e %.3f\n", solve_status_name(report.status).c_str(),
                report.iterations, report.final_error, report.wall_time_s);
  }
  if (!opt.out_path.empty()) save_report(report, n1, opt.out_path);
  if (!opt.history_path.empty()) save_history_csv(report, opt.history_path);
  return exit_code_for(report.status);
}

int run_generate(int n1, int n2, int sn, std::uint64_t seed, bool monotone,
                 const std::string& out_path) {
  GeneratorParams params{n1, n2, sn, seed};
  TwoStageSlcp slcp =
      monotone ? gen_monotone_slcp(params) : gen_pseudo_slcp(params);
  save_instance(slcp, out_path);
  std::cout << "wrote " << out_path << " (" << sn << " scenarios, dim "
            << slcp.dim() << ")\n";
  return 0;
}

SviProblem builtin_problem(const std::string& name) {
  if (name == "orange") return make_problem(orange_market().slcp);
  for (TextbookExample& ex : textbook_examples())
    if (ex.name == name) return std::move(ex.problem);
  throw std::invalid_argument("unknown builtin problem: " + name);
}

int run_elicit(const std::string& instance_path, const std::string& builtin,
               const std::string& criterion, double e2, double e3,
               int grid_points, std::uint64_t grid_seed, double grid_lo,
               double grid_hi, const std::string& out_path) {
  SviProblem problem = builtin.empty() ? load_instance(instance_path)
                                       : builtin_problem(builtin);

  EvalGrid grid;
  if (problem.all_affine() && grid_points <= 1) {
    grid = EvalGrid::affine_point(problem);
  } else {
    const int n = problem.space->decision_dim();
    grid = EvalGrid::latin_hypercube(
        problem, Eigen::VectorXd::Constant(n, grid_lo),
        Eigen::VectorXd::Constant(n, grid_hi),
        std::max(grid_points, 1), grid_seed);
  }

  std::vector<ElicitationReport> reports;
  if (criterion == "all") {
    reports = check_all(problem, grid, e2, e3);
  } else {
    std::optional<Criterion> c = criterion_from_name(criterion);
    if (!c) throw std::invalid_argument("unknown criterion: " + criterion);
    switch (*c) {
      case Criterion::Coupling:
        reports.push_back(check_coupling(problem, grid));
        break;
      case Criterion::CommutingSpectrum:
        reports.push_back(check_commuting_spectrum(problem, grid));
        break;
      case Criterion::SpectralRadius:
        reports.push_back(check_spectral_radius(problem, grid));
        break;
      case Criterion::EigenvalueMultiplicity:
        reports.push_back(check_eigenvalue_multiplicity(problem, grid, e2));
        break;
      case Criterion::PairedBlocks:
        reports.push_back(check_paired_blocks(problem, grid, e2));
        break;
      case Criterion::DiagonalDominance:
        reports.push_back(check_diagonal_dominance(problem, grid, e3));
        break;
      case Criterion::DominanceLevel:
        reports.push_back(compute_dominance_level(problem, grid));
        break;
    }
  }

  nlohmann::json out = nlohmann::json::array();
  for (const ElicitationReport& r : reports)
    out.push_back(elicitation_report_to_json(r));
  std::cout << out.dump(2) << "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open " + out_path);
    f << out.dump(2) << "\n";
  }
  return 0;
}

struct BenchCell {
  int n1, n2, sn;
};

std::vector<BenchCell> parse_cells(const std::vector<std::string>& specs) {
  std::vector<BenchCell> cells;
  for (const std::string& s : specs) {
    BenchCell cell{};
    if (std::sscanf(s.c_str(), "%dx%d@%d", &cell.n1, &cell.n2, &cell.sn) != 3)
      throw std::invalid_argument("cell must look like n1xn2@sn: " + s);
    cells.push_back(cell);
  }
  return cells;
}

int run_bench(const std::vector<std::string>& cell_specs, int seeds,
              double tol, int max_iter, int threads, std::uint64_t base_seed,
              bool monotone, int stall_window, const std::string& out_path) {
  std::vector<BenchCell> cells = parse_cells(cell_specs);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << "dim,sn,r,avg_iter,avg_time_s,converged_frac\n";

  for (const BenchCell& cell : cells) {
    const double r_values[2] = {1.0,
                                std::sqrt(double(cell.n1) + double(cell.n2))};
    for (double r : r_values) {
      double iter_sum = 0.0, time_sum = 0.0;
      int converged = 0, counted = 0;
      for (int k = 0; k < seeds; ++k) {
        GeneratorParams params{cell.n1, cell.n2, cell.sn, base_seed + k};
        try {
          SviProblem problem = make_problem(
              monotone ? gen_monotone_slcp(params) : gen_pseudo_slcp(params));
          PhaConfig cfg;
          cfg.r = r;
          cfg.tol = tol;
          cfg.max_iter = max_iter;
          cfg.threads = threads;
          cfg.record_history = false;
          cfg.stall_exit_window = stall_window;
          SolveReport rep = pha_solve(problem, cfg);
          ++counted;
          if (rep.status == SolveStatus::Converged) {
            ++converged;
            iter_sum += rep.iterations;
            time_sum += rep.wall_time_s;
          }
        } catch (const std::exception& e) {
          std::cerr << "cell [" << cell.n1 << "," << cell.n2 << "]@" << cell.sn
                    << " seed " << (base_seed + k) << " failed: " << e.what()
                    << "\n";
          ++counted;
        }
      }
      const double avg_iter = converged ? iter_sum / converged : 0.0;
      const double avg_time = converged ? time_sum / converged : 0.0;
      const double frac = counted ? double(converged) / counted : 0.0;
      char line[160];
      std::snprintf(line, sizeof(line), "[%d;%d],%d,%.6g,%.1f,%.3f,%.2f\n",
                    cell.n1, cell.n2, cell.sn, r, avg_iter, avg_time, frac);
      out << line;
      std::cout << line;
    }
  }
  return 0;
}

int run_verify(const std::string& instance_path,
               const std::string& solution_path) {
  SviProblem problem = load_instance(instance_path);
  Policy x = load_solution(problem, solution_path);
  const double err = stopping_error(problem, x);
  std::printf("err %.6e\n", err);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario-decomposed solver for stochastic variational "
               "inequalities with monotonicity-elicitation certificates"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "run the hedging solver");
  solve->add_option("instance", solve_opt.instance_path)->required();
  solve->add_option("--r", solve_opt.r, "proximal parameter");
  double s_flag = -1.0;
  solve->add_option("--s", s_flag, "elicitation level (default r/2)");
  solve->add_option("--rho", solve_opt.rho, "dual relaxation in (0,2)");
  solve->add_option("--tol", solve_opt.tol, "stopping tolerance");
  solve->add_option("--max-iter", solve_opt.max_iter);
  solve->add_option("--threads", solve_opt.threads);
  solve->add_option("--out", solve_opt.out_path, "report JSON path");
  solve->add_option("--history", solve_opt.history_path, "history CSV path");
  solve->add_option("--format", solve_opt.format,
                    "stdout form: status line, full report, or history rows")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  std::uint64_t solve_seed = 0;
  solve->add_option("--seed", solve_seed,
                    "accepted for interface uniformity; solves are "
                    "deterministic");

  int gen_n1 = 1, gen_n2 = 1, gen_sn = 1;
  std::uint64_t gen_seed = 0;
  bool gen_monotone = false;
  std::string gen_out = "instance.json";
  CLI::App* generate = app.add_subcommand("generate", "write a random instance");
  generate->add_option("--n1", gen_n1)->required();
  generate->add_option("--n2", gen_n2)->required();
  generate->add_option("--sn", gen_sn, "scenario count")->required();
  generate->add_option("--seed", gen_seed);
  generate->add_flag("--monotone", gen_monotone,
                     "all-PSD variant with a ridge (monotone baseline)");
  generate->add_option("--out", gen_out);

  std::string el_instance, el_builtin, el_criterion = "all", el_out;
  double el_e2 = 1.0, el_e3 = 1.0, el_lo = 0.0, el_hi = 10.0;
  int el_grid = 1;
  std::uint64_t el_seed = 0;
  CLI::App* elicit = app.add_subcommand("elicit", "run elicitation checkers");
  elicit->add_option("instance", el_instance);
  elicit->add_option("--builtin", el_builtin,
                     "orange | saddle-2d | flat-negative-2d | drift-3d | "
                     "commuting-pair-4d");
  elicit->add_option("--criterion", el_criterion,
                     "all | coupling | commuting_spectrum | spectral_radius | "
                     "eigenvalue_multiplicity | paired_blocks | "
                     "diagonal_dominance | dominance_level");
  elicit->add_option("--e2", el_e2, "level for the multiplicity criteria");
  elicit->add_option("--e3", el_e3, "level for the dominance criterion");
  elicit->add_option("--grid", el_grid, "sample-grid size for nonlinear maps");
  elicit->add_option("--seed,--grid-seed", el_seed, "sample-grid seed");
  elicit->add_option("--grid-lo", el_lo);
  elicit->add_option("--grid-hi", el_hi);
  elicit->add_option("--out", el_out);

  std::vector<std::string> bench_cells = {"40x20@50", "40x20@100", "50x50@50",
                                          "100x100@50"};
  int bench_seeds = 10, bench_max_iter = 2000, bench_threads = 1;
  int bench_stall = 60;
  bool bench_monotone = false;
  double bench_tol = 1e-5;
  std::uint64_t bench_seed = 1;
  std::string bench_out = "bench.csv";
  CLI::App* bench = app.add_subcommand("bench", "benchmark table sweep");
  bench->add_option("--cells", bench_cells, "cells as n1xn2@sn");
  bench->add_option("--seeds", bench_seeds, "instances per cell");
  bench->add_option("--tol", bench_tol);
  bench->add_option("--max-iter", bench_max_iter);
  bench->add_option("--threads", bench_threads);
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_flag("--monotone", bench_monotone,
                  "drop the structured first scenario (all-PSD cells)");
  bench->add_option("--stall-window", bench_stall,
                    "exit runs whose error flatlines this many iterations "
                    "(0 disables)");
  bench->add_option("--out", bench_out);

  std::string ver_instance, ver_solution;
  CLI::App* verify = app.add_subcommand("verify", "evaluate a solution file");
  verify->add_option("instance", ver_instance)->required();
  verify->add_option("solution", ver_solution)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      if (s_flag >= 0.0) solve_opt.s = s_flag;
      return run_solve(solve_opt);
    }
    if (generate->parsed())
      return run_generate(gen_n1, gen_n2, gen_sn, gen_seed, gen_monotone,
                          gen_out);
    if (elicit->parsed()) {
      if (el_instance.empty() && el_builtin.empty())
        throw std::invalid_argument("elicit needs an instance or --builtin");
      return run_elicit(el_instance, el_builtin, el_criterion, el_e2, el_e3,
                        el_grid, el_seed, el_lo, el_hi, el_out);
    }
    if (bench->parsed())
      return run_bench(bench_cells, bench_seeds, bench_tol, bench_max_iter,
                       bench_threads, bench_seed, bench_monotone, bench_stall,
                       bench_out);
    if (verify->parsed()) return run_verify(ver_instance, ver_solution);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
