#pragma once

#include <Eigen/Dense>
#include <vector>

#include "svipha/rng.hpp"
#include "svipha/scenario_space.hpp"

namespace svipha::testing {

/// Random stage tree with up to `max_stages` stages and `max_scenarios`
/// scenarios. Branch labels are drawn so sibling groups of varying size
/// appear at every stage.
inline ScenarioSpacePtr random_tree(Rng& rng, int max_stages = 3,
                                    int max_scenarios = 30) {
  const int stages = 1 + static_cast<int>(rng.next_below(max_stages));
  std::vector<int> dims(stages);
  int total = 0;
  for (int& d : dims) {
    d = static_cast<int>(rng.next_below(3));  // allow dimension-0 stages
    total += d;
  }
  if (total == 0) dims[0] = 1;

  const int num_scen = 1 + static_cast<int>(rng.next_below(max_scenarios));
  std::vector<Scenario> scenarios(num_scen);
  std::vector<double> p(num_scen);
  double mass = 0.0;
  for (double& v : p) {
    v = 0.05 + rng.uniform01();
    mass += v;
  }
  for (int i = 0; i < num_scen; ++i) {
    scenarios[i].probability = p[i] / mass;
    scenarios[i].branch.resize(stages - 1);
    for (int k = 0; k < stages - 1; ++k)
      scenarios[i].branch[k] = static_cast<int>(rng.next_below(3 + k));
  }
  // Absorb rounding so the masses sum to one exactly.
  double sum = 0.0;
  for (int i = 0; i + 1 < num_scen; ++i) sum += scenarios[i].probability;
  scenarios[num_scen - 1].probability = 1.0 - sum;
  return ScenarioSpace::create(std::move(dims), std::move(scenarios));
}

inline Policy random_policy(const ScenarioSpacePtr& space, Rng& rng) {
  Eigen::MatrixXd values(space->num_scenarios(), space->decision_dim());
  for (int i = 0; i < values.rows(); ++i)
    for (int j = 0; j < values.cols(); ++j) values(i, j) = rng.uniform(-1, 1);
  return Policy(space, std::move(values));
}

/// Dense matrix with symmetric part bounded below by `margin`.
inline Eigen::MatrixXd random_strongly_monotone(int n, Rng& rng,
                                                double margin = 0.5) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
  Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const double shift = std::max(0.0, -es.eigenvalues().minCoeff()) + margin;
  return a + shift * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::VectorXd random_vector(int n, Rng& rng, double lo = -1,
                                     double hi = 1) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

}  // namespace svipha::testing
