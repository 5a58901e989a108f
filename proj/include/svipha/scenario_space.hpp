#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace svipha {

/// One realization of the stagewise random vector. `branch` holds the outcome
/// labels of the first N-1 stages; the stage-k decision may depend on the
/// prefix of length k-1, so two scenarios sharing that prefix must receive the
/// same stage-k decision block.
struct Scenario {
  double probability = 0.0;
  std::vector<int> branch;
};

/// Finite probability space with stage structure. Immutable after
/// construction; shared by the policies defined over it.
class ScenarioSpace {
 public:
  struct Group {
    std::vector<int> members;  // scenario indices, increasing
    double probability = 0.0;  // total mass of the group
  };

  static std::shared_ptr<const ScenarioSpace> create(
      std::vector<int> stage_dims, std::vector<Scenario> scenarios);

  /// Two-stage space: stage-1 decisions shared by all scenarios, stage-2
  /// decisions free per scenario.
  static std::shared_ptr<const ScenarioSpace> two_stage(
      int stage1_dim, int stage2_dim, const std::vector<double>& probabilities);

  /// Deterministic space (J = 1, single stage).
  static std::shared_ptr<const ScenarioSpace> deterministic(int dim);

  int num_stages() const { return static_cast<int>(stage_dims_.size()); }
  int num_scenarios() const { return static_cast<int>(scenarios_.size()); }
  int decision_dim() const { return decision_dim_; }           // n
  int iso_dim() const { return decision_dim_ * num_scenarios(); }  // n * J
  int stage_dim(int k) const { return stage_dims_[k]; }
  int stage_offset(int k) const { return stage_offsets_[k]; }
  double probability(int i) const { return scenarios_[i].probability; }
  const std::vector<Scenario>& scenarios() const { return scenarios_; }

  /// Partition of the scenarios at stage k (0-based): scenarios in one group
  /// share the information available when the stage-k decision is made.
  const std::vector<Group>& stage_groups(int k) const { return groups_[k]; }

 private:
  ScenarioSpace(std::vector<int> stage_dims, std::vector<Scenario> scenarios);

  std::vector<int> stage_dims_;
  std::vector<int> stage_offsets_;
  int decision_dim_ = 0;
  std::vector<Scenario> scenarios_;
  std::vector<std::vector<Group>> groups_;  // per stage
};

using ScenarioSpacePtr = std::shared_ptr<const ScenarioSpace>;

/// A mapping from scenarios to decision vectors, stored scenario-major
/// (row i is the decision under scenario i).
class Policy {
 public:
  Policy() = default;
  Policy(ScenarioSpacePtr space, Eigen::MatrixXd values);
  static Policy zero(ScenarioSpacePtr space);
  static Policy constant(ScenarioSpacePtr space, const Eigen::VectorXd& row);

  const ScenarioSpacePtr& space() const { return space_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }
  Eigen::VectorXd row(int i) const { return values_.row(i); }
  void set_row(int i, const Eigen::VectorXd& v) { values_.row(i) = v; }

 private:
  ScenarioSpacePtr space_;
  Eigen::MatrixXd values_;
};

/// Probability-weighted inner product sum_xi p(xi) <x(xi), y(xi)>.
double inner_product(const Policy& x, const Policy& y);
double policy_norm(const Policy& x);

/// Orthogonal projection onto the nonanticipativity subspace: each stage
/// block is replaced by its conditional expectation over the information
/// group, written once per group so the result is exactly nonanticipative.
Policy project_nonanticipative(const Policy& x);

/// Complementary projection x - P_N(x); the multiplier space.
Policy project_multiplier(const Policy& x);

/// Max-norm of the group-conditional expectations of every stage block;
/// zero iff the policy lies in the multiplier subspace.
double multiplier_defect(const Policy& w);

/// Max-norm of x - P_N(x) evaluated groupwise; zero iff nonanticipative.
double nonanticipativity_defect(const Policy& x);

/// Bitwise check that all rows of each information group carry identical
/// stage blocks.
bool is_nonanticipative_exact(const Policy& x);

/// Isometry into flat Euclidean coordinates: scenario i's block scaled by
/// sqrt(p_i), concatenated in scenario order.
Eigen::VectorXd to_iso(const Policy& x);
Policy from_iso(ScenarioSpacePtr space, const Eigen::VectorXd& v);

enum class Subspace { Nonanticipative, Multiplier };

/// Orthonormal basis (columns) of the image of the nonanticipativity
/// subspace under the isometry. Exact by construction.
Eigen::MatrixXd iso_nonanticipative_basis(const ScenarioSpace& space);

/// Orthonormal basis of the complementary (multiplier) image, computed from
/// the eigendecomposition of the complementary projector.
Eigen::MatrixXd iso_multiplier_basis(const ScenarioSpace& space);

/// Dense orthogonal projector onto the chosen subspace image.
Eigen::MatrixXd iso_projection_matrix(const ScenarioSpace& space, Subspace which);

}  // namespace svipha
