#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "svipha/svi_model.hpp"

namespace svipha::oracle {

/// All solutions of the complementarity problem 0 <= x, Mx + q >= 0,
/// <x, Mx+q> = 0, found by enumerating the 2^n active/inactive patterns.
/// Patterns whose basis submatrix is singular are skipped, never perturbed.
struct LcpEnumeration {
  std::vector<Eigen::VectorXd> solutions;
  int singular_skipped = 0;
};

LcpEnumeration lcp_enumerate(const Eigen::MatrixXd& m,
                             const Eigen::VectorXd& q);

/// A first-stage vector plus one second-stage vector per scenario.
struct ExtensiveSolution {
  Eigen::VectorXd x1;
  Eigen::MatrixXd x2;  // row per scenario
};

/// Enumerates the expectation-aggregated complementarity system of a
/// two-stage SLCP as one problem of dimension n1 + J*n2.
std::vector<ExtensiveSolution> extensive_slcp_oracle(const TwoStageSlcp& slcp);

/// Central finite-difference Jacobian, column j stepped by h*(1+|x_j|).
Eigen::MatrixXd fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h);

/// Desk-scale probe of the solution set of a problem whose flat dimension is
/// at most 2: scans a grid over the feasible nonanticipative set for points
/// with small natural-map residual and spot-checks midpoint convexity.
struct ProbeReport {
  std::vector<Eigen::VectorXd> solutions;  // flat coordinates
  bool nonempty = false;
  double diameter = 0.0;
  bool midpoint_convex = true;
  int points_scanned = 0;
};

ProbeReport solution_set_probe(const SviProblem& problem, double grid_radius,
                               double grid_step, double tol = 1e-6);

}  // namespace svipha::oracle
