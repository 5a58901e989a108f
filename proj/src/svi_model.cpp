#include "svipha/svi_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace svipha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

FeasibleSet::FeasibleSet(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(lower_.size() == upper_.size(), "bound dimensions differ");
  for (int i = 0; i < lower_.size(); ++i) {
    require(!(std::isnan(lower_[i]) || std::isnan(upper_[i])),
            "bounds must not be NaN");
    require(lower_[i] <= upper_[i], "empty feasible set: lower > upper");
  }
}

FeasibleSet FeasibleSet::orthant(int dim) {
  return FeasibleSet(Eigen::VectorXd::Zero(dim),
                     Eigen::VectorXd::Constant(dim, kInf));
}

FeasibleSet FeasibleSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  return FeasibleSet(std::move(lower), std::move(upper));
}

bool FeasibleSet::is_orthant() const {
  return (lower_.array() == 0.0).all() && (upper_.array() == kInf).all();
}

Eigen::VectorXd FeasibleSet::project(const Eigen::VectorXd& v) const {
  require(v.size() == lower_.size(), "projection dimension mismatch");
  return v.cwiseMax(lower_).cwiseMin(upper_);
}

bool FeasibleSet::contains(const Eigen::VectorXd& v, double tol) const {
  require(v.size() == lower_.size(), "containment dimension mismatch");
  return ((v - lower_).array() >= -tol).all() &&
         ((upper_ - v).array() >= -tol).all();
}

ScenarioMap ScenarioMap::affine_map(Eigen::MatrixXd m, Eigen::VectorXd offset) {
  require(m.rows() == m.cols() && m.rows() == offset.size(),
          "affine map needs a square matrix and matching offset");
  ScenarioMap map;
  auto mat = std::make_shared<const Eigen::MatrixXd>(std::move(m));
  auto off = std::make_shared<const Eigen::VectorXd>(std::move(offset));
  map.value = [mat, off](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return (*mat) * x + (*off);
  };
  map.jacobian = [mat](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return *mat;
  };
  map.affine = true;
  return map;
}

Eigen::VectorXd ScenarioMap::eval(const Eigen::VectorXd& x) const {
  require(static_cast<bool>(value), "scenario map has no evaluator");
  return value(x);
}

Eigen::MatrixXd ScenarioMap::jac(const Eigen::VectorXd& x) const {
  if (jacobian) return jacobian(x);
  // Central differences, step per coordinate.
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd out(n, n);
  Eigen::VectorXd xp = x, xm = x;
  for (int j = 0; j < n; ++j) {
    const double h = 1e-5 * (1.0 + std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    out.col(j) = (eval(xp) - eval(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return out;
}

void TwoStageSlcp::validate() const {
  require(n1 >= 1 && n2 >= 0, "stage dimensions must be positive");
  require(!probabilities.empty(), "at least one scenario required");
  require(m.size() == probabilities.size() && q.size() == probabilities.size(),
          "one matrix and one offset per scenario");
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    require(probabilities[i] > 0.0, "probabilities must be positive");
    total += probabilities[i];
    require(m[i].rows() == dim() && m[i].cols() == dim(),
            "scenario matrix has wrong shape");
    require(q[i].size() == dim(), "scenario offset has wrong shape");
  }
  require(std::abs(total - 1.0) <= 1e-12, "probabilities must sum to 1");
}

void SviProblem::validate() const {
  require(space != nullptr, "problem needs a scenario space");
  const int num_scen = space->num_scenarios();
  require(static_cast<int>(maps.size()) == num_scen,
          "one map per scenario required");
  require(static_cast<int>(sets.size()) == num_scen,
          "one feasible set per scenario required");
  for (const FeasibleSet& s : sets)
    require(s.dim() == space->decision_dim(), "feasible set dimension mismatch");
  if (custom_iso_n_basis)
    require(custom_iso_n_basis->rows() == space->iso_dim(),
            "custom subspace basis must have iso dimension rows");
}

bool SviProblem::all_affine() const {
  for (const ScenarioMap& map : maps)
    if (!map.affine) return false;
  return true;
}

SviProblem make_problem(std::shared_ptr<const TwoStageSlcp> slcp) {
  slcp->validate();
  SviProblem problem;
  problem.space =
      ScenarioSpace::two_stage(slcp->n1, slcp->n2, slcp->probabilities);
  for (int i = 0; i < slcp->num_scenarios(); ++i) {
    problem.maps.push_back(ScenarioMap::affine_map(slcp->m[i], slcp->q[i]));
    problem.sets.push_back(FeasibleSet::orthant(slcp->dim()));
  }
  problem.slcp = std::move(slcp);
  return problem;
}

SviProblem make_problem(const TwoStageSlcp& slcp) {
  return make_problem(std::make_shared<const TwoStageSlcp>(slcp));
}

Policy eval_F(const SviProblem& problem, const Policy& x) {
  const ScenarioSpace& sp = *problem.space;
  Eigen::MatrixXd out(sp.num_scenarios(), sp.decision_dim());
  for (int i = 0; i < sp.num_scenarios(); ++i) {
    Eigen::VectorXd fi = problem.maps[i].eval(x.row(i));
    if (!fi.allFinite()) {
      std::ostringstream msg;
      msg << "map evaluation produced non-finite values at scenario " << i;
      throw std::runtime_error(msg.str());
    }
    out.row(i) = fi.transpose();
  }
  return Policy(x.space(), std::move(out));
}

double extensive_residual(const SviProblem& problem, const Policy& x,
                          const Policy& w) {
  const ScenarioSpace& sp = *problem.space;
  Policy fx = eval_F(problem, x);
  double res = 0.0;
  for (int i = 0; i < sp.num_scenarios(); ++i) {
    Eigen::VectorXd xi = x.row(i);
    Eigen::VectorXd target = xi - fx.row(i) - w.row(i);
    Eigen::VectorXd natural = xi - problem.sets[i].project(target);
    res = std::max(res, natural.cwiseAbs().maxCoeff());
  }
  res = std::max(res, nonanticipativity_defect(x));
  res = std::max(res, multiplier_defect(w));
  return res;
}

Eigen::MatrixXd problem_iso_n_basis(const SviProblem& problem) {
  if (problem.custom_iso_n_basis) {
    const Eigen::MatrixXd& basis = *problem.custom_iso_n_basis;
    Eigen::MatrixXd gram = basis.transpose() * basis;
    gram -= Eigen::MatrixXd::Identity(basis.cols(), basis.cols());
    if (gram.cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("custom subspace basis is not orthonormal");
    return basis;
  }
  return iso_nonanticipative_basis(*problem.space);
}

Eigen::MatrixXd problem_iso_n_projector(const SviProblem& problem) {
  Eigen::MatrixXd basis = problem_iso_n_basis(problem);
  return basis * basis.transpose();
}

Eigen::MatrixXd problem_iso_m_projector(const SviProblem& problem) {
  const int dim = problem.space->iso_dim();
  return Eigen::MatrixXd::Identity(dim, dim) - problem_iso_n_projector(problem);
}

double slcp_stopping_error(const TwoStageSlcp& slcp, const Policy& x) {
  const int n1 = slcp.n1;
  const int n2 = slcp.n2;
  const int num_scen = slcp.num_scenarios();

  Policy xn = project_nonanticipative(x);
  Eigen::VectorXd x1 = xn.row(0).head(n1);

  // First-stage residual of the expectation system.
  Eigen::VectorXd agg = Eigen::VectorXd::Zero(n1);
  for (int i = 0; i < num_scen; ++i) {
    Eigen::VectorXd x2i = xn.row(i).tail(n2);
    agg += slcp.probabilities[i] *
           (slcp.m11(i) * x1 + slcp.m12(i) * x2i + slcp.q1(i));
  }
  Eigen::VectorXd proj1 = (x1 - agg).cwiseMax(0.0);
  double err1 = (x1 - proj1).norm() / (1.0 + x1.norm());

  // Second-stage residuals, one per scenario.
  double err2 = 0.0;
  for (int i = 0; i < num_scen; ++i) {
    Eigen::VectorXd x2i = xn.row(i).tail(n2);
    Eigen::VectorXd g = slcp.m21(i) * x1 + slcp.m22(i) * x2i + slcp.q2(i);
    Eigen::VectorXd proj2 = (x2i - g).cwiseMax(0.0);
    err2 = std::max(err2, (x2i - proj2).norm() / (1.0 + x2i.norm()));
  }
  return std::max(err1, err2);
}

}  // namespace svipha
