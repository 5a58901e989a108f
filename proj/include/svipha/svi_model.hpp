#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "svipha/scenario_space.hpp"

namespace svipha {

/// Per-scenario feasible set: a box whose bounds may be infinite. The
/// nonnegative orthant is the box [0, +inf)^n.
class FeasibleSet {
 public:
  static FeasibleSet orthant(int dim);
  static FeasibleSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  bool is_orthant() const;

  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  bool contains(const Eigen::VectorXd& v, double tol) const;

 private:
  FeasibleSet(Eigen::VectorXd lower, Eigen::VectorXd upper);
  Eigen::VectorXd lower_, upper_;
};

/// Evaluator for one scenario's mapping x -> F(x, xi), with an optional
/// analytic Jacobian. When no Jacobian is supplied, central finite
/// differences with step 1e-5 * (1 + |x_i|) are used.
struct ScenarioMap {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;  // optional
  bool affine = false;

  static ScenarioMap affine_map(Eigen::MatrixXd m, Eigen::VectorXd offset);

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jac(const Eigen::VectorXd& x) const;
};

/// Two-stage stochastic linear complementarity problem: per scenario an
/// affine map with block structure (n1 first-stage rows, n2 second-stage
/// rows) over the nonnegative orthant.
struct TwoStageSlcp {
  int n1 = 0;
  int n2 = 0;
  std::vector<double> probabilities;
  std::vector<Eigen::MatrixXd> m;  // full (n1+n2) x (n1+n2), one per scenario
  std::vector<Eigen::VectorXd> q;

  int dim() const { return n1 + n2; }
  int num_scenarios() const { return static_cast<int>(probabilities.size()); }
  void validate() const;

  auto m11(int i) const { return m[i].topLeftCorner(n1, n1); }
  auto m12(int i) const { return m[i].topRightCorner(n1, n2); }
  auto m21(int i) const { return m[i].bottomLeftCorner(n2, n1); }
  auto m22(int i) const { return m[i].bottomRightCorner(n2, n2); }
  auto q1(int i) const { return q[i].head(n1); }
  auto q2(int i) const { return q[i].tail(n2); }
};

/// Problem data for the extensive form: a scenario space, one map and one
/// feasible set per scenario. `custom_iso_n_basis`, when present, overrides
/// the nonanticipativity subspace image used by the elicitation checkers
/// (needed for problems whose subspace split is given explicitly rather
/// than derived from stage structure).
struct SviProblem {
  ScenarioSpacePtr space;
  std::vector<ScenarioMap> maps;
  std::vector<FeasibleSet> sets;
  std::optional<Eigen::MatrixXd> custom_iso_n_basis;
  std::shared_ptr<const TwoStageSlcp> slcp;  // set when built from an SLCP

  void validate() const;
  bool all_affine() const;
};

/// Builds the extensive-form problem for an SLCP. The returned problem keeps
/// a reference to the SLCP so SLCP-specific residuals stay available.
SviProblem make_problem(std::shared_ptr<const TwoStageSlcp> slcp);
SviProblem make_problem(const TwoStageSlcp& slcp);

/// Scenario-wise application of the mapping. Non-finite evaluator output is
/// reported with the offending scenario index.
Policy eval_F(const SviProblem& problem, const Policy& x);

/// Solution certificate for the extensive form: the max over scenarios of
/// the natural-map residual ||x(xi) - Proj_C(x(xi) - F(x(xi)) - w(xi))||_inf,
/// combined (by max) with the nonanticipativity defect of x and the
/// multiplier-subspace defect of w. Zero exactly at extensive-form solutions.
double extensive_residual(const SviProblem& problem, const Policy& x,
                          const Policy& w);

/// The SLCP stopping error: max of the normalized first-stage residual of
/// the expectation system and the per-scenario second-stage residuals,
/// normalized by 1 + ||x1|| and 1 + ||x2(xi)||. The first stage of x is
/// projected before evaluation so x1 is common to all scenarios.
double slcp_stopping_error(const TwoStageSlcp& slcp, const Policy& x);

/// Orthonormal basis of the nonanticipativity image in flat coordinates:
/// the problem's explicit basis when one is set, otherwise the basis derived
/// from the stage structure.
Eigen::MatrixXd problem_iso_n_basis(const SviProblem& problem);

/// Orthogonal projectors built from problem_iso_n_basis.
Eigen::MatrixXd problem_iso_n_projector(const SviProblem& problem);
Eigen::MatrixXd problem_iso_m_projector(const SviProblem& problem);

}  // namespace svipha
