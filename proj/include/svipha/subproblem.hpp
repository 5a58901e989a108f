#pragma once

#include <Eigen/Dense>

#include "svipha/svi_model.hpp"

namespace svipha {

/// One scenario's regularized inclusion: find x with
///   -F(x) - w - r (x - x_anchor)  in  N_C(x),
/// solved through the componentwise Fischer-Burmeister reformulation of the
/// equivalent box complementarity system with G(x) = F(x) + w + r(x - anchor).
struct SubproblemSpec {
  ScenarioMap map;
  FeasibleSet set;
  Eigen::VectorXd w;
  Eigen::VectorXd x_anchor;
  double r = 1.0;
};

struct NewtonConfig {
  double inner_tol = 1e-10;    // on ||Phi||_inf
  int max_iters = 100;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-12;
  double kink_delta = 1e-12;   // derivative selection radius at FB kinks
};

enum class SubStatus { Converged, MaxIters, SingularSystem };

struct SubproblemResult {
  Eigen::VectorXd x;
  SubStatus status = SubStatus::Converged;
  int newton_iters = 0;
  double residual = 0.0;       // final ||Phi||_inf
  // Set when the merit had to increase (watchdog step) and later recovered:
  // the hallmark of a locally nonmonotone subproblem.
  bool nonunique_suspect = false;
};

/// Fischer-Burmeister residual of the spec at x; zero exactly at solutions
/// of the inclusion.
Eigen::VectorXd fb_residual(const SubproblemSpec& spec,
                            const Eigen::VectorXd& x);

SubproblemResult solve_scenario_subproblem(const SubproblemSpec& spec,
                                           const Eigen::VectorXd& warm_start,
                                           const NewtonConfig& cfg = {});

}  // namespace svipha
