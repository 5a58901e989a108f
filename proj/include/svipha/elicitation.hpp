#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svipha/svi_model.hpp"

namespace svipha {

/// The certificate families. Each one gives a sufficient condition for the
/// mapping-plus-normal-cone operator to become maximal monotone once
/// s * P_M is added, together with a level bound for s.
enum class Criterion {
  Coupling,                // alpha/beta/gamma coupling bound, strict
  CommutingSpectrum,       // commuting projector + eigenvalue sign pattern
  SpectralRadius,          // trace-identity variant bounded by the radius
  EigenvalueMultiplicity,  // min eigenvalue of DF+e2*P has multiplicity >= 2
  PairedBlocks,            // block-diagonal with identical block pairs
  DiagonalDominance,       // DF+e3*P strictly diagonally dominant
  DominanceLevel,          // closed-form dominance level from P's diagonal
};

std::string criterion_name(Criterion c);
std::optional<Criterion> criterion_from_name(const std::string& name);

/// Sample of flat-coordinate points at which x-dependent quantities are
/// evaluated. For affine maps a single point is exact; otherwise the reports
/// are only grid-certified.
struct EvalGrid {
  std::vector<Eigen::VectorXd> points;
  bool exact = false;

  static EvalGrid affine_point(const SviProblem& problem);
  static EvalGrid latin_hypercube(const SviProblem& problem,
                                  const Eigen::VectorXd& lo,
                                  const Eigen::VectorXd& hi, int count,
                                  std::uint64_t seed);
  static EvalGrid from_policies(const std::vector<Policy>& policies);
};

struct ElicitationReport {
  Criterion criterion = Criterion::Coupling;
  bool applicable = false;
  std::optional<double> level_bound;
  bool strict = false;          // true: s > bound; false: s >= bound
  bool grid_certified = false;  // true when derived from a sample grid only
  std::string failure_reason;

  // criterion-specific payloads (unused entries left empty)
  std::vector<double> alphas, betas, gammas;     // coupling terms per point
  std::vector<double> min_eigenvalues;           // per grid point
  std::vector<double> df_eigenvalues;            // common-basis spectrum
  std::vector<double> projector_eigenvalues;     // matching 0/1 pattern
  std::vector<double> spectral_radii;
  double symmetry_defect = 0.0;
  double commutation_defect = 0.0;
  double trace_defect = 0.0;
  double diagonality_defect = 0.0;
  int min_multiplicity = 0;
  std::vector<std::pair<int, int>> block_pairing;
  double min_dominance_margin = 0.0;
  int failing_row = -1;
  bool open_superset_mode = false;
};

/// Jacobian of the flattened mapping at a flat point: block diagonal with
/// the i-th block equal to DF(., xi^i) at the de-scaled point (the
/// probability scalings cancel through the chain rule).
Eigen::MatrixXd iso_jacobian(const SviProblem& problem,
                             const Eigen::VectorXd& x_iso);

/// Largest singular value through the eigendecomposition of the Gram matrix.
double spectral_norm(const Eigen::MatrixXd& a);

enum class CouplingDomain { Feasible, OpenSuperset };

/// Coupling criterion: alpha = min eigenvalue of the symmetric part
/// restricted to the nonanticipative image; beta = cross-coupling norm;
/// gamma = multiplier-block norm. Bound = max over grid of beta^2/alpha +
/// gamma, valid strictly above. Inapplicable when alpha <= 0 anywhere.
/// In OpenSuperset mode the grid may range over an open superset of the
/// feasible set and the mapping must not vanish on it.
ElicitationReport check_coupling(const SviProblem& problem,
                                 const EvalGrid& grid,
                                 CouplingDomain domain = CouplingDomain::Feasible);

/// Commuting-spectrum criterion: requires a symmetric Jacobian commuting
/// with the multiplier projector, and every negative Jacobian eigenvalue
/// paired with a projector eigenvalue of one. Bound = max(0, -min eigenvalue).
ElicitationReport check_commuting_spectrum(const SviProblem& problem,
                                           const EvalGrid& grid);

/// Spectral-radius variant: the commutation test is the trace identity
/// tr((DF P)^2) = tr(DF^2 P), the sign condition is that DF P is not
/// positive semidefinite, and the bound is the spectral radius of DF.
ElicitationReport check_spectral_radius(const SviProblem& problem,
                                        const EvalGrid& grid);

/// Level e2 is certified when the minimum eigenvalue of DF + e2 P has
/// multiplicity at least two at every grid point.
ElicitationReport check_eigenvalue_multiplicity(const SviProblem& problem,
                                                const EvalGrid& grid,
                                                double e2);

/// Level e2_hat is certified when DF + e2_hat P is block diagonal along the
/// scenario layout and its blocks split into pairs of identical blocks.
ElicitationReport check_paired_blocks(const SviProblem& problem,
                                      const EvalGrid& grid, double e2_hat);

/// Level e3 is certified when DF + e3 P has positive diagonal and is
/// strictly diagonally dominant (hence positive definite by symmetry).
ElicitationReport check_diagonal_dominance(const SviProblem& problem,
                                           const EvalGrid& grid, double e3);

/// Closed-form dominance level: with I the positive-diagonal index set of P,
/// rows outside I of both matrices must vanish and the I-submatrix of P must
/// be strictly dominant; the returned bound is valid strictly above.
ElicitationReport compute_dominance_level(const SviProblem& problem,
                                          const EvalGrid& grid);

/// All criteria in a fixed order; e2 and e3 feed the two level checkers.
std::vector<ElicitationReport> check_all(const SviProblem& problem,
                                         const EvalGrid& grid, double e2,
                                         double e3);

/// bound + eps for callers that need an actual level to run with.
double usable_level(const ElicitationReport& report, double eps = 1e-2);

/// Min over the grid of the smallest eigenvalue of sym(DF) + level * P_M:
/// the operational meaning of a certified level for differentiable maps.
double certificate_min_eigenvalue(const SviProblem& problem,
                                  const EvalGrid& grid, double level);

/// A sampled witness against pseudomonotonicity.
struct PseudomonotoneViolation {
  int scenario = -1;
  std::string kind;  // "pair", "jacobian", "negative_eigenvalues"
  Eigen::VectorXd x;
  Eigen::VectorXd aux;  // the second point or the tangent direction
  double value = 0.0;   // the offending inner product / eigenvalue
};

/// Direct witness tests (usable with hand-picked points).
bool pair_violates(const ScenarioMap& map, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);
bool jacobian_violates(const ScenarioMap& map, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u);

/// Sampling falsifier: draws point pairs in the feasible set and tangent
/// directions orthogonal to the mapping value; any flagged witness disproves
/// pseudomonotonicity (an empty result proves nothing).
std::vector<PseudomonotoneViolation> falsify_pseudomonotone(
    const SviProblem& problem, int sample_count, std::uint64_t seed);

}  // namespace svipha
