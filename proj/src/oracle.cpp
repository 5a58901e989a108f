#include "svipha/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace svipha::oracle {

namespace {

constexpr double kFeasTol = 1e-10;
constexpr double kDedupeTol = 1e-8;

bool already_listed(const std::vector<Eigen::VectorXd>& found,
                    const Eigen::VectorXd& x) {
  for (const Eigen::VectorXd& s : found)
    if ((s - x).cwiseAbs().maxCoeff() <= kDedupeTol) return true;
  return false;
}

}  // namespace

LcpEnumeration lcp_enumerate(const Eigen::MatrixXd& m,
                             const Eigen::VectorXd& q) {
  const int n = static_cast<int>(q.size());
  if (m.rows() != n || m.cols() != n)
    throw std::invalid_argument("matrix/vector dimensions differ");
  if (n > 14)
    throw std::invalid_argument("pattern enumeration capped at n = 14");

  LcpEnumeration out;
  for (std::uint32_t pattern = 0; pattern < (1u << n); ++pattern) {
    std::vector<int> active;
    for (int i = 0; i < n; ++i)
      if (pattern & (1u << i)) active.push_back(i);
    const int k = static_cast<int>(active.size());

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (k > 0) {
      Eigen::MatrixXd mbb(k, k);
      Eigen::VectorXd qb(k);
      for (int r = 0; r < k; ++r) {
        qb[r] = q[active[r]];
        for (int c = 0; c < k; ++c) mbb(r, c) = m(active[r], active[c]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(mbb);
      if (!lu.isInvertible()) {
        ++out.singular_skipped;
        continue;
      }
      Eigen::VectorXd xb = lu.solve(-qb);
      bool feasible = true;
      for (int r = 0; r < k; ++r) {
        if (xb[r] < -kFeasTol) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      for (int r = 0; r < k; ++r) x[active[r]] = std::max(xb[r], 0.0);
    }

    Eigen::VectorXd residual = m * x + q;
    bool complementary = true;
    for (int i = 0; i < n; ++i) {
      if (!(pattern & (1u << i)) && residual[i] < -kFeasTol) {
        complementary = false;
        break;
      }
    }
    if (!complementary) continue;

    if (!already_listed(out.solutions, x)) out.solutions.push_back(x);
  }
  return out;
}

std::vector<ExtensiveSolution> extensive_slcp_oracle(const TwoStageSlcp& slcp) {
  slcp.validate();
  const int n1 = slcp.n1;
  const int n2 = slcp.n2;
  const int num_scen = slcp.num_scenarios();
  const int dim = n1 + num_scen * n2;
  if (dim > 14)
    throw std::invalid_argument(
        "aggregated dimension n1 + J*n2 exceeds the enumeration cap");

  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < num_scen; ++i) {
    const double p = slcp.probabilities[i];
    big.topLeftCorner(n1, n1) += p * slcp.m11(i);
    big.block(0, n1 + i * n2, n1, n2) = p * slcp.m12(i);
    big.block(n1 + i * n2, 0, n2, n1) = slcp.m21(i);
    big.block(n1 + i * n2, n1 + i * n2, n2, n2) = slcp.m22(i);
    q.head(n1) += p * slcp.q1(i);
    q.segment(n1 + i * n2, n2) = slcp.q2(i);
  }

  std::vector<ExtensiveSolution> out;
  for (const Eigen::VectorXd& sol : lcp_enumerate(big, q).solutions) {
    ExtensiveSolution es;
    es.x1 = sol.head(n1);
    es.x2.resize(num_scen, n2);
    for (int i = 0; i < num_scen; ++i)
      es.x2.row(i) = sol.segment(n1 + i * n2, n2).transpose();
    out.push_back(std::move(es));
  }
  return out;
}

Eigen::MatrixXd fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd out;
  Eigen::VectorXd xp = x, xm = x;
  for (int j = 0; j < n; ++j) {
    const double step = h * (1.0 + std::abs(x[j]));
    xp[j] = x[j] + step;
    xm[j] = x[j] - step;
    Eigen::VectorXd fp = f(xp);
    Eigen::VectorXd fm = f(xm);
    if (!fp.allFinite() || !fm.allFinite())
      throw std::runtime_error("non-finite evaluation in finite differences");
    if (out.size() == 0) out.resize(fp.size(), n);
    out.col(j) = (fp - fm) / (2.0 * step);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return out;
}

namespace {

// Projection onto the intersection of the scaled feasible box and the
// nonanticipative subspace by Dykstra's alternating scheme. Flat dimension
// here is at most 2, so the fixed iteration budget is generous.
Eigen::VectorXd project_feasible_subspace(const SviProblem& problem,
                                          const Eigen::MatrixXd& projector,
                                          const Eigen::VectorXd& z) {
  const ScenarioSpace& sp = *problem.space;
  const int n = sp.decision_dim();
  Eigen::VectorXd lo(sp.iso_dim()), hi(sp.iso_dim());
  for (int i = 0; i < sp.num_scenarios(); ++i) {
    const double scale = std::sqrt(sp.probability(i));
    lo.segment(i * n, n) = scale * problem.sets[i].lower();
    hi.segment(i * n, n) = scale * problem.sets[i].upper();
  }

  Eigen::VectorXd y = z;
  Eigen::VectorXd p_corr = Eigen::VectorXd::Zero(z.size());
  Eigen::VectorXd q_corr = Eigen::VectorXd::Zero(z.size());
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::VectorXd a = (y + p_corr).cwiseMax(lo).cwiseMin(hi);
    p_corr = y + p_corr - a;
    Eigen::VectorXd next = projector * (a + q_corr);
    q_corr = a + q_corr - next;
    if ((next - y).cwiseAbs().maxCoeff() < 1e-13 && iter > 2) return next;
    y = next;
  }
  return y;
}

}  // namespace

ProbeReport solution_set_probe(const SviProblem& problem, double grid_radius,
                               double grid_step, double tol) {
  problem.validate();
  if (problem.space->iso_dim() > 2)
    throw std::invalid_argument("probe supports flat dimension <= 2 only");
  if (grid_step <= 0.0 || grid_radius <= 0.0)
    throw std::invalid_argument("grid radius and step must be positive");

  const Eigen::MatrixXd basis = problem_iso_n_basis(problem);
  const Eigen::MatrixXd projector = basis * basis.transpose();
  const int free_dims = static_cast<int>(basis.cols());

  auto residual_at = [&](const Eigen::VectorXd& v) {
    Policy x = from_iso(problem.space, v);
    Eigen::VectorXd fx = to_iso(eval_F(problem, x));
    Eigen::VectorXd target = project_feasible_subspace(problem, projector,
                                                       v - fx);
    return (v - target).norm();
  };

  auto feasible = [&](const Eigen::VectorXd& v) {
    Policy x = from_iso(problem.space, v);
    for (int i = 0; i < problem.space->num_scenarios(); ++i)
      if (!problem.sets[i].contains(x.row(i), 1e-12)) return false;
    return true;
  };

  ProbeReport report;
  const int steps = static_cast<int>(std::floor(grid_radius / grid_step));
  std::vector<Eigen::VectorXd> found;

  std::function<void(int, Eigen::VectorXd&)> scan = [&](int d,
                                                        Eigen::VectorXd& t) {
    if (d == free_dims) {
      Eigen::VectorXd v = basis * t;
      ++report.points_scanned;
      if (!feasible(v)) return;
      if (residual_at(v) <= tol) found.push_back(v);
      return;
    }
    for (int s = -steps; s <= steps; ++s) {
      t[d] = s * grid_step;
      scan(d + 1, t);
    }
  };
  Eigen::VectorXd t = Eigen::VectorXd::Zero(free_dims);
  if (free_dims == 0) {
    // Single candidate: the origin of the subspace.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(problem.space->iso_dim());
    ++report.points_scanned;
    if (feasible(v) && residual_at(v) <= tol) found.push_back(v);
  } else {
    scan(0, t);
  }

  report.solutions = found;
  report.nonempty = !found.empty();
  for (std::size_t i = 0; i < found.size(); ++i)
    for (std::size_t j = i + 1; j < found.size(); ++j) {
      report.diameter = std::max(report.diameter, (found[i] - found[j]).norm());
      Eigen::VectorXd mid = 0.5 * (found[i] + found[j]);
      if (residual_at(mid) > 2.0 * tol) report.midpoint_convex = false;
    }
  return report;
}

}  // namespace svipha::oracle
