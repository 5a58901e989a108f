#pragma once

#include <optional>
#include <vector>

#include "svipha/subproblem.hpp"
#include "svipha/svi_model.hpp"

namespace svipha {

/// Outer-loop parameters. The dual step is rho * (r - s); with rho = 1 and
/// s = 0 the iteration is the classical progressive hedging update.
struct PhaConfig {
  double r = 1.0;
  std::optional<double> s;  // defaults to r / 2 when unset
  double rho = 1.618;
  double tol = 1e-5;
  int max_iter = 2000;
  NewtonConfig inner;
  bool record_history = true;
  int threads = 1;
  // When positive: give up (MaxIters) after this many consecutive outer
  // iterations without at least 5% error improvement. Benchmark sweeps use
  // it to cut short runs whose residual has flatlined far above tolerance.
  int stall_exit_window = 0;

  double s_value() const { return s ? *s : r / 2.0; }
  void validate() const;
};

enum class SolveStatus { Converged, MaxIters, InnerFailure };

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIters;
  int iterations = 0;
  double final_error = 0.0;
  std::vector<double> error_history;
  std::vector<double> rs_norm_history;
  Policy x_final;
  Policy w_final;
  double wall_time_s = 0.0;

  // diagnostics
  int failed_scenario = -1;   // set on InnerFailure
  int failed_iteration = -1;  // set on InnerFailure
  bool iterates_nonanticipative_exact = true;
  double max_multiplier_defect = 0.0;
  bool nonunique_suspect = false;
  // Subsolves that hit their iteration cap and handed back a best-effort
  // point. The outer loop continues through these; nonmonotone scenario maps
  // routinely produce locally unsolvable proximal systems early on.
  long inner_stalls = 0;
};

/// Runs the relaxed-dual progressive hedging iteration: per-scenario
/// proximal subsolves warm-started from the previous local solutions, primal
/// update by nonanticipative projection, dual update by rho*(r-s) times the
/// decoupling residual, with the multiplier re-projected each iteration to
/// cap floating-point drift.
SolveReport pha_solve(const SviProblem& problem, const PhaConfig& cfg,
                      const std::optional<Policy>& x0 = std::nullopt,
                      const std::optional<Policy>& w0 = std::nullopt);

/// Stopping criterion: the SLCP expectation-system residual when the problem
/// carries SLCP data, otherwise the stagewise group-aggregated projected
/// residual (which coincides with the former on SLCP instances). Always
/// evaluated on the nonanticipative projection of x.
double stopping_error(const SviProblem& problem, const Policy& x);

/// sqrt(||x||^2 + ||w||^2 / (r (r - s))) in the policy-space norm.
double rs_norm(const Policy& x, const Policy& w, double r, double s);

}  // namespace svipha
