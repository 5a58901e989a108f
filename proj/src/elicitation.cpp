#include "svipha/elicitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "svipha/rng.hpp"

namespace svipha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMatrixTol = 1e-8;    // symmetry / commutation / trace
constexpr double kBlockTol = 1e-10;    // block equality and zero-row checks
constexpr double kNegativeTol = 1e-10; // "has a negative eigenvalue"

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigendecomposition failed");
  return es.eigenvalues();
}

void require_grid(const EvalGrid& grid) {
  if (grid.points.empty())
    throw std::invalid_argument("evaluation grid is empty");
}

double max_abs(const Eigen::MatrixXd& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Coupling: return "coupling";
    case Criterion::CommutingSpectrum: return "commuting_spectrum";
    case Criterion::SpectralRadius: return "spectral_radius";
    case Criterion::EigenvalueMultiplicity: return "eigenvalue_multiplicity";
    case Criterion::PairedBlocks: return "paired_blocks";
    case Criterion::DiagonalDominance: return "diagonal_dominance";
    case Criterion::DominanceLevel: return "dominance_level";
  }
  return "unknown";
}

std::optional<Criterion> criterion_from_name(const std::string& name) {
  for (Criterion c :
       {Criterion::Coupling, Criterion::CommutingSpectrum,
        Criterion::SpectralRadius, Criterion::EigenvalueMultiplicity,
        Criterion::PairedBlocks, Criterion::DiagonalDominance,
        Criterion::DominanceLevel})
    if (criterion_name(c) == name) return c;
  return std::nullopt;
}

EvalGrid EvalGrid::affine_point(const SviProblem& problem) {
  problem.validate();
  const ScenarioSpace& sp = *problem.space;
  Eigen::MatrixXd values(sp.num_scenarios(), sp.decision_dim());
  for (int i = 0; i < sp.num_scenarios(); ++i)
    values.row(i) = problem.sets[i]
                        .project(Eigen::VectorXd::Zero(sp.decision_dim()))
                        .transpose();
  EvalGrid grid;
  grid.points.push_back(to_iso(Policy(problem.space, std::move(values))));
  grid.exact = problem.all_affine();
  return grid;
}

EvalGrid EvalGrid::latin_hypercube(const SviProblem& problem,
                                   const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi, int count,
                                   std::uint64_t seed) {
  problem.validate();
  const ScenarioSpace& sp = *problem.space;
  const int n = sp.decision_dim();
  if (lo.size() != n || hi.size() != n)
    throw std::invalid_argument("sampling box must have decision dimension");
  if (count < 1) throw std::invalid_argument("grid needs at least one point");

  Rng rng(seed);
  const int dims = sp.num_scenarios() * n;
  // One stratum permutation per coordinate.
  std::vector<std::vector<int>> strata(dims);
  for (int d = 0; d < dims; ++d) {
    strata[d].resize(count);
    std::iota(strata[d].begin(), strata[d].end(), 0);
    for (int j = count - 1; j > 0; --j)
      std::swap(strata[d][j],
                strata[d][static_cast<int>(rng.next_below(j + 1))]);
  }

  EvalGrid grid;
  for (int j = 0; j < count; ++j) {
    Eigen::MatrixXd values(sp.num_scenarios(), n);
    for (int i = 0; i < sp.num_scenarios(); ++i)
      for (int c = 0; c < n; ++c) {
        const int d = i * n + c;
        const double frac = (strata[d][j] + rng.uniform01()) / count;
        values(i, c) = lo[c] + (hi[c] - lo[c]) * frac;
      }
    for (int i = 0; i < sp.num_scenarios(); ++i)
      values.row(i) = problem.sets[i].project(values.row(i)).transpose();
    grid.points.push_back(to_iso(Policy(problem.space, std::move(values))));
  }
  grid.exact = false;
  return grid;
}

EvalGrid EvalGrid::from_policies(const std::vector<Policy>& policies) {
  EvalGrid grid;
  for (const Policy& p : policies) grid.points.push_back(to_iso(p));
  grid.exact = false;
  return grid;
}

Eigen::MatrixXd iso_jacobian(const SviProblem& problem,
                             const Eigen::VectorXd& x_iso) {
  const ScenarioSpace& sp = *problem.space;
  const int n = sp.decision_dim();
  if (x_iso.size() != sp.iso_dim())
    throw std::invalid_argument("flat point has wrong dimension");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(sp.iso_dim(), sp.iso_dim());
  for (int i = 0; i < sp.num_scenarios(); ++i) {
    const Eigen::VectorXd de_scaled =
        x_iso.segment(i * n, n) / std::sqrt(sp.probability(i));
    Eigen::MatrixXd block = problem.maps[i].jac(de_scaled);
    if (!block.allFinite())
      throw std::runtime_error("Jacobian evaluation failed");
    out.block(i * n, i * n, n, n) = block;
  }
  return out;
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::VectorXd evs = symmetric_eigenvalues(gram);
  return std::sqrt(std::max(0.0, evs.maxCoeff()));
}

ElicitationReport check_coupling(const SviProblem& problem,
                                 const EvalGrid& grid, CouplingDomain domain) {
  require_grid(grid);
  ElicitationReport report;
  report.criterion = Criterion::Coupling;
  report.strict = true;
  report.grid_certified = !grid.exact;
  report.open_superset_mode = (domain == CouplingDomain::OpenSuperset);

  const Eigen::MatrixXd basis = problem_iso_n_basis(problem);
  const Eigen::MatrixXd pn = basis * basis.transpose();
  const Eigen::MatrixXd pm =
      Eigen::MatrixXd::Identity(pn.rows(), pn.cols()) - pn;

  double bound = -kInf;
  for (const Eigen::VectorXd& point : grid.points) {
    if (report.open_superset_mode) {
      // The simplification assumes the mapping does not vanish here.
      Policy x = from_iso(problem.space, point);
      if (to_iso(eval_F(problem, x)).norm() <= 1e-12) {
        report.applicable = false;
        report.failure_reason = "mapping vanishes at a grid point";
        return report;
      }
    }
    const Eigen::MatrixXd a = iso_jacobian(problem, point);
    const Eigen::MatrixXd h = 0.5 * (a + a.transpose());

    double alpha = kInf;  // no nonanticipative directions: constraint vacuous
    if (basis.cols() > 0)
      alpha = symmetric_eigenvalues(basis.transpose() * h * basis).minCoeff();
    const double beta = spectral_norm(pn * h * pm);
    const double gamma = spectral_norm(pm * a * pm);
    report.alphas.push_back(alpha);
    report.betas.push_back(beta);
    report.gammas.push_back(gamma);

    if (alpha <= 0.0) {
      report.applicable = false;
      report.failure_reason = "alpha <= 0 on the nonanticipative subspace";
      return report;
    }
    const double term = (alpha == kInf ? 0.0 : beta * beta / alpha) + gamma;
    bound = std::max(bound, term);
  }
  report.applicable = true;
  report.level_bound = bound;
  return report;
}

namespace {

// Common eigenbasis of a projector and a commuting symmetric matrix: the
// projector's 0- and 1-eigenspaces are diagonalized separately. Returns the
// matrix eigenvalues aligned with the projector's 0/1 pattern and the
// residual off-diagonal mass of the matrix in that basis.
struct CommonBasis {
  Eigen::VectorXd matrix_eigenvalues;
  Eigen::VectorXd projector_eigenvalues;
  double diagonality_defect = 0.0;
};

CommonBasis common_eigenbasis(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& projector) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esp(projector);
  if (esp.info() != Eigen::Success)
    throw std::runtime_error("projector eigendecomposition failed");
  const int dim = static_cast<int>(projector.rows());

  std::vector<int> zeros, ones;
  for (int i = 0; i < dim; ++i)
    (esp.eigenvalues()[i] < 0.5 ? zeros : ones).push_back(i);

  Eigen::MatrixXd q(dim, dim);
  Eigen::VectorXd pattern(dim);
  int col = 0;
  for (const std::vector<int>* part : {&zeros, &ones}) {
    const double value = (part == &zeros) ? 0.0 : 1.0;
    const int k = static_cast<int>(part->size());
    if (k == 0) continue;
    Eigen::MatrixXd u(dim, k);
    for (int j = 0; j < k; ++j) u.col(j) = esp.eigenvectors().col((*part)[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esa(u.transpose() * a * u);
    if (esa.info() != Eigen::Success)
      throw std::runtime_error("restricted eigendecomposition failed");
    q.middleCols(col, k) = u * esa.eigenvectors();
    pattern.segment(col, k).setConstant(value);
    col += k;
  }

  CommonBasis out;
  Eigen::MatrixXd diag = q.transpose() * a * q;
  out.matrix_eigenvalues = diag.diagonal();
  out.projector_eigenvalues = pattern;
  diag.diagonal().setZero();
  out.diagonality_defect = max_abs(diag);
  return out;
}

}  // namespace

ElicitationReport check_commuting_spectrum(const SviProblem& problem,
                                           const EvalGrid& grid) {
  require_grid(grid);
  ElicitationReport report;
  report.criterion = Criterion::CommutingSpectrum;
  report.strict = false;
  report.grid_certified = !grid.exact;

  const Eigen::MatrixXd pm = problem_iso_m_projector(problem);
  double min_eig = kInf;
  bool first = true;
  for (const Eigen::VectorXd& point : grid.points) {
    const Eigen::MatrixXd a = iso_jacobian(problem, point);
    report.symmetry_defect =
        std::max(report.symmetry_defect, max_abs(a - a.transpose()));
    report.commutation_defect =
        std::max(report.commutation_defect, max_abs(a * pm - pm * a));
    if (report.symmetry_defect > kMatrixTol) {
      report.failure_reason = "Jacobian is not symmetric";
      return report;
    }
    if (report.commutation_defect > kMatrixTol) {
      report.failure_reason = "Jacobian does not commute with the projector";
      return report;
    }

    CommonBasis basis = common_eigenbasis(a, pm);
    report.diagonality_defect =
        std::max(report.diagonality_defect, basis.diagonality_defect);
    for (int i = 0; i < basis.matrix_eigenvalues.size(); ++i) {
      if (basis.matrix_eigenvalues[i] < -kNegativeTol &&
          basis.projector_eigenvalues[i] < 0.5) {
        report.failure_reason =
            "negative Jacobian eigenvalue outside the multiplier image";
        return report;
      }
    }
    if (first) {
      report.df_eigenvalues.assign(
          basis.matrix_eigenvalues.data(),
          basis.matrix_eigenvalues.data() + basis.matrix_eigenvalues.size());
      report.projector_eigenvalues.assign(
          basis.projector_eigenvalues.data(),
          basis.projector_eigenvalues.data() +
              basis.projector_eigenvalues.size());
      first = false;
    }
    const double point_min = basis.matrix_eigenvalues.minCoeff();
    report.min_eigenvalues.push_back(point_min);
    min_eig = std::min(min_eig, point_min);
  }
  report.applicable = true;
  report.level_bound = std::max(0.0, -min_eig);
  return report;
}

ElicitationReport check_spectral_radius(const SviProblem& problem,
                                        const EvalGrid& grid) {
  require_grid(grid);
  ElicitationReport report;
  report.criterion = Criterion::SpectralRadius;
  report.strict = false;
  report.grid_certified = !grid.exact;

  const Eigen::MatrixXd pm = problem_iso_m_projector(problem);
  double bound = 0.0;
  for (const Eigen::VectorXd& point : grid.points) {
    const Eigen::MatrixXd a = iso_jacobian(problem, point);
    report.symmetry_defect =
        std::max(report.symmetry_defect, max_abs(a - a.transpose()));
    if (report.symmetry_defect > kMatrixTol) {
      report.failure_reason = "Jacobian is not symmetric";
      return report;
    }
    const Eigen::MatrixXd ap = a * pm;
    const double trace_defect =
        std::abs((ap * ap).trace() - (a * a * pm).trace());
    report.trace_defect = std::max(report.trace_defect, trace_defect);
    if (trace_defect > kMatrixTol) {
      report.failure_reason = "trace identity fails (no commuting basis)";
      return report;
    }
    // ap is symmetric once the trace identity holds.
    const Eigen::VectorXd ap_eigs =
        symmetric_eigenvalues(0.5 * (ap + ap.transpose()));
    if (ap_eigs.minCoeff() >= -kNegativeTol) {
      report.failure_reason =
          "Jacobian times projector is positive semidefinite";
      return report;
    }
    const Eigen::VectorXd a_eigs = symmetric_eigenvalues(a);
    const double radius =
        std::max(std::abs(a_eigs.minCoeff()), std::abs(a_eigs.maxCoeff()));
    report.spectral_radii.push_back(radius);
    bound = std::max(bound, radius);
  }
  report.applicable = true;
  report.level_bound = bound;
  return report;
}

ElicitationReport check_eigenvalue_multiplicity(const SviProblem& problem,
                                                const EvalGrid& grid,
                                                double e2) {
  if (e2 <= 0.0) throw std::invalid_argument("level e2 must be positive");
  require_grid(grid);
  ElicitationReport report;
  report.criterion = Criterion::EigenvalueMultiplicity;
  report.strict = false;
  report.grid_certified = !grid.exact;

  const Eigen::MatrixXd pm = problem_iso_m_projector(problem);
  report.min_multiplicity = std::numeric_limits<int>::max();
  for (const Eigen::VectorXd& point : grid.points) {
    const Eigen::MatrixXd a = iso_jacobian(problem, point);
    report.symmetry_defect =
        std::max(report.symmetry_defect, max_abs(a - a.transpose()));
    if (report.symmetry_defect > kMatrixTol) {
      report.failure_reason = "Jacobian is not symmetric";
      report.min_multiplicity = 0;
      return report;
    }
    const Eigen::VectorXd eigs =
        symmetric_eigenvalues(0.5 * (a + a.transpose()) + e2 * pm);
    const double min_eig = eigs.minCoeff();
    const double cluster = kMatrixTol * (1.0 + std::abs(min_eig));
    int multiplicity = 0;
    for (int i = 0; i < eigs.size(); ++i)
      if (eigs[i] <= min_eig + cluster) ++multiplicity;
    report.min_eigenvalues.push_back(min_eig);
    report.min_multiplicity = std::min(report.min_multiplicity, multiplicity);
    if (multiplicity < 2) {
      report.failure_reason = "minimum eigenvalue is simple";
      return report;
    }
  }
  report.applicable = true;
  report.level_bound = e2;
  return report;
}

ElicitationReport check_paired_blocks(const SviProblem& problem,
                                      const EvalGrid& grid, double e2_hat) {
  if (e2_hat <= 0.0) throw std::invalid_argument("level must be positive");
  require_grid(grid);
  ElicitationReport report;
  report.criterion = Criterion::PairedBlocks;
  report.strict = false;
  report.grid_certified = !grid.exact;

  const ScenarioSpace& sp = *problem.space;
  const int n = sp.decision_dim();
  const int num_blocks = sp.num_scenarios();
  if (num_blocks % 2 != 0) {
    report.failure_reason = "odd scenario block count";
    return report;
  }

  const Eigen::MatrixXd pm = problem_iso_m_projector(problem);
  for (const Eigen::VectorXd& point : grid.points) {
    Eigen::MatrixXd matrix = iso_jacobian(problem, point) + e2_hat * pm;

    // Off-block mass: only the projector can put anything there.
    double off_block = 0.0;
    for (int i = 0; i < num_blocks; ++i)
      for (int j = 0; j < num_blocks; ++j) {
        if (i == j) continue;
        off_block =
            std::max(off_block, max_abs(matrix.block(i * n, j * n, n, n)));
      }
    if (off_block > kBlockTol) {
      report.failure_reason = "matrix is not block diagonal along scenarios";
      return report;
    }

    std::vector<bool> paired(num_blocks, false);
    std::vector<std::pair<int, int>> pairing;
    for (int i = 0; i < num_blocks; ++i) {
      if (paired[i]) continue;
      int partner = -1;
      for (int j = i + 1; j < num_blocks; ++j) {
        if (paired[j]) continue;
        if (max_abs(matrix.block(i * n, i * n, n, n) -
                    matrix.block(j * n, j * n, n, n)) <= kBlockTol) {
          partner = j;
          break;
        }
      }
      if (partner < 0) {
        report.failure_reason = "no identical partner block found";
        report.block_pairing.clear();
        return report;
      }
      paired[i] = paired[partner] = true;
      pairing.emplace_back(i, partner);
    }
    report.block_pairing = pairing;
  }
  report.applicable = true;
  report.level_bound = e2_hat;
  return report;
}

ElicitationReport check_diagonal_dominance(const SviProblem& problem,
                                           const EvalGrid& grid, double e3) {
  if (e3 <= 0.0) throw std::invalid_argument("level e3 must be positive");
  require_grid(grid);
  ElicitationReport report;
  report.criterion = Criterion::DiagonalDominance;
  report.strict = false;
  report.grid_certified = !grid.exact;

  const Eigen::MatrixXd pm = problem_iso_m_projector(problem);
  report.min_dominance_margin = kInf;
  for (const Eigen::VectorXd& point : grid.points) {
    const Eigen::MatrixXd a = iso_jacobian(problem, point);
    report.symmetry_defect =
        std::max(report.symmetry_defect, max_abs(a - a.transpose()));
    if (report.symmetry_defect > kMatrixTol) {
      report.failure_reason = "Jacobian is not symmetric";
      return report;
    }
    const Eigen::MatrixXd m = a + e3 * pm;
    for (int i = 0; i < m.rows(); ++i) {
      const double diag = m(i, i);
      const double off = m.row(i).cwiseAbs().sum() - std::abs(diag);
      report.min_dominance_margin =
          std::min(report.min_dominance_margin, diag - off);
      if (diag <= 0.0) {
        report.failure_reason = "nonpositive diagonal entry";
        report.failing_row = i;
        return report;
      }
      if (diag <= off) {
        report.failure_reason = "row is not strictly diagonally dominant";
        report.failing_row = i;
        return report;
      }
    }
  }
  report.applicable = true;
  report.level_bound = e3;
  return report;
}

ElicitationReport compute_dominance_level(const SviProblem& problem,
                                          const EvalGrid& grid) {
  require_grid(grid);
  ElicitationReport report;
  report.criterion = Criterion::DominanceLevel;
  report.strict = true;
  report.grid_certified = !grid.exact;

  const Eigen::MatrixXd pm = problem_iso_m_projector(problem);
  const int dim = static_cast<int>(pm.rows());
  std::vector<int> inside;
  for (int i = 0; i < dim; ++i)
    if (pm(i, i) > 1e-12) inside.push_back(i);
  std::vector<bool> in_set(dim, false);
  for (int i : inside) in_set[i] = true;

  // The projector rows outside the index set must vanish.
  report.min_dominance_margin = kInf;
  for (int i = 0; i < dim; ++i) {
    if (in_set[i]) continue;
    if (pm.row(i).cwiseAbs().maxCoeff() > kBlockTol) {
      report.failure_reason = "projector has a nonzero row outside the set";
      report.failing_row = i;
      return report;
    }
  }
  for (int i : inside) {
    const double margin = pm(i, i) - (pm.row(i).cwiseAbs().sum() - pm(i, i));
    report.min_dominance_margin = std::min(report.min_dominance_margin, margin);
    if (margin <= 0.0) {
      report.failure_reason = "projector submatrix is not strictly dominant";
      report.failing_row = i;
      return report;
    }
  }

  double bound = -kInf;
  for (const Eigen::VectorXd& point : grid.points) {
    const Eigen::MatrixXd a = iso_jacobian(problem, point);
    report.symmetry_defect =
        std::max(report.symmetry_defect, max_abs(a - a.transpose()));
    if (report.symmetry_defect > kMatrixTol) {
      report.failure_reason = "Jacobian is not symmetric";
      return report;
    }
    for (int i = 0; i < dim; ++i) {
      if (in_set[i]) continue;
      if (a.row(i).cwiseAbs().maxCoeff() > kBlockTol) {
        report.failure_reason = "Jacobian has a nonzero row outside the set";
        report.failing_row = i;
        return report;
      }
    }
    for (int i : inside) {
      const double excess = (a.row(i).cwiseAbs().sum() - std::abs(a(i, i))) -
                            a(i, i);
      const double margin = pm(i, i) - (pm.row(i).cwiseAbs().sum() - pm(i, i));
      bound = std::max(bound, excess / margin);
      bound = std::max(bound, -a(i, i));
    }
  }
  report.applicable = true;
  report.level_bound = bound;
  return report;
}

std::vector<ElicitationReport> check_all(const SviProblem& problem,
                                         const EvalGrid& grid, double e2,
                                         double e3) {
  std::vector<ElicitationReport> out;
  out.push_back(check_coupling(problem, grid));
  out.push_back(check_commuting_spectrum(problem, grid));
  out.push_back(check_spectral_radius(problem, grid));
  out.push_back(check_eigenvalue_multiplicity(problem, grid, e2));
  out.push_back(check_paired_blocks(problem, grid, e2));
  out.push_back(check_diagonal_dominance(problem, grid, e3));
  out.push_back(compute_dominance_level(problem, grid));
  return out;
}

double usable_level(const ElicitationReport& report, double eps) {
  if (!report.applicable || !report.level_bound)
    throw std::invalid_argument("report carries no certified level");
  return *report.level_bound + eps;
}

double certificate_min_eigenvalue(const SviProblem& problem,
                                  const EvalGrid& grid, double level) {
  require_grid(grid);
  const Eigen::MatrixXd pm = problem_iso_m_projector(problem);
  double min_eig = kInf;
  for (const Eigen::VectorXd& point : grid.points) {
    const Eigen::MatrixXd a = iso_jacobian(problem, point);
    const Eigen::MatrixXd shifted =
        0.5 * (a + a.transpose()) + level * pm;
    min_eig = std::min(min_eig, symmetric_eigenvalues(shifted).minCoeff());
  }
  return min_eig;
}

bool pair_violates(const ScenarioMap& map, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
  const Eigen::VectorXd d = y - x;
  return map.eval(x).dot(d) >= 0.0 && map.eval(y).dot(d) < -kNegativeTol;
}

bool jacobian_violates(const ScenarioMap& map, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u) {
  const Eigen::VectorXd f = map.eval(x);
  if (f.norm() <= 1e-12) return false;
  Eigen::VectorXd tangent = u - (u.dot(f) / f.squaredNorm()) * f;
  if (tangent.norm() <= 1e-12) return false;
  return tangent.dot(map.jac(x) * tangent) < -kNegativeTol;
}

namespace {

Eigen::VectorXd sample_feasible(const FeasibleSet& set, Rng& rng) {
  const int n = set.dim();
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    const double lo = set.lower()[i];
    const double hi = set.upper()[i];
    if (lo > -kInf && hi < kInf) {
      x[i] = rng.uniform(lo, hi);
    } else if (lo > -kInf) {
      x[i] = lo + 2.0 * std::abs(rng.gaussian());
    } else if (hi < kInf) {
      x[i] = hi - 2.0 * std::abs(rng.gaussian());
    } else {
      x[i] = 2.0 * rng.gaussian();
    }
  }
  return x;
}

}  // namespace

std::vector<PseudomonotoneViolation> falsify_pseudomonotone(
    const SviProblem& problem, int sample_count, std::uint64_t seed) {
  if (sample_count < 1)
    throw std::invalid_argument("sample count must be positive");
  problem.validate();

  std::vector<PseudomonotoneViolation> violations;
  Rng rng(seed);
  const int num_scen = problem.space->num_scenarios();
  for (int s = 0; s < num_scen; ++s) {
    const ScenarioMap& map = problem.maps[s];
    const FeasibleSet& set = problem.sets[s];
    bool eigencheck_done = false;

    for (int k = 0; k < sample_count; ++k) {
      Eigen::VectorXd x = sample_feasible(set, rng);
      Eigen::VectorXd y = sample_feasible(set, rng);
      const Eigen::VectorXd fx = map.eval(x);
      const Eigen::VectorXd fy = map.eval(y);
      const Eigen::VectorXd d = y - x;
      if (fx.dot(d) >= 0.0 && fy.dot(d) < -kNegativeTol) {
        violations.push_back({s, "pair", x, y, fy.dot(d)});
      } else if (fy.dot(-d) >= 0.0 && fx.dot(-d) < -kNegativeTol) {
        violations.push_back({s, "pair", y, x, fx.dot(-d)});
      }

      if (fx.norm() > 1e-12) {
        Eigen::VectorXd u(x.size());
        for (int i = 0; i < u.size(); ++i) u[i] = rng.gaussian();
        u -= (u.dot(fx) / fx.squaredNorm()) * fx;
        if (u.norm() > 1e-12) {
          const double curvature = u.dot(map.jac(x) * u);
          if (curvature < -kNegativeTol)
            violations.push_back({s, "jacobian", x, u, curvature});
        }
      }

      if (!eigencheck_done && (map.affine || k == 0)) {
        const Eigen::MatrixXd jac = map.jac(x);
        if (max_abs(jac - jac.transpose()) <= kMatrixTol) {
          const Eigen::VectorXd eigs = symmetric_eigenvalues(jac);
          int negatives = 0;
          for (int i = 0; i < eigs.size(); ++i)
            if (eigs[i] < -kNegativeTol) ++negatives;
          if (negatives >= 2)
            violations.push_back(
                {s, "negative_eigenvalues", x, Eigen::VectorXd(),
                 eigs.minCoeff()});
        }
        eigencheck_done = map.affine;
      }
    }
  }
  return violations;
}

}  // namespace svipha
