#include "svipha/pha.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace svipha {

void PhaConfig::validate() const {
  if (r <= 0.0) throw std::invalid_argument("r must be positive");
  const double sv = s_value();
  if (sv < 0.0 || sv >= r) throw std::invalid_argument("need r > s >= 0");
  if (rho <= 0.0 || rho >= 2.0) throw std::invalid_argument("rho must be in (0,2)");
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

namespace {

// Projections dispatching on the problem's subspace description: the exact
// groupwise form for stage-structured problems, the dense projector when an
// explicit basis overrides it.
Policy project_n(const SviProblem& problem, const Policy& x) {
  if (!problem.custom_iso_n_basis) return project_nonanticipative(x);
  Eigen::MatrixXd proj = problem_iso_n_projector(problem);
  return from_iso(problem.space, proj * to_iso(x));
}

Policy project_m(const SviProblem& problem, const Policy& x) {
  if (!problem.custom_iso_n_basis) return project_multiplier(x);
  Policy nx = project_n(problem, x);
  return Policy(x.space(), x.values() - nx.values());
}

double m_defect(const SviProblem& problem, const Policy& w) {
  if (!problem.custom_iso_n_basis) return multiplier_defect(w);
  Policy nw = project_n(problem, w);
  return nw.values().cwiseAbs().maxCoeff();
}

struct Step1Outcome {
  bool failed = false;  // hard failure (singular system)
  int failed_scenario = -1;
  bool nonunique_suspect = false;
  long stalls = 0;  // iteration-capped subsolves, continued from best iterate
};

Step1Outcome run_step1(const SviProblem& problem, const PhaConfig& cfg,
                       const Policy& x, const Policy& w,
                       Eigen::MatrixXd& xhat) {
  const int num_scen = problem.space->num_scenarios();
  std::vector<SubStatus> status(num_scen, SubStatus::Converged);
  std::vector<char> suspect(num_scen, 0);

  auto solve_range = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      SubproblemSpec spec{problem.maps[i], problem.sets[i], w.row(i), x.row(i),
                          cfg.r};
      SubproblemResult res =
          solve_scenario_subproblem(spec, xhat.row(i), cfg.inner);
      status[i] = res.status;
      suspect[i] = res.nonunique_suspect ? 1 : 0;
      xhat.row(i) = res.x.transpose();
    }
  };

  const int threads = std::min(cfg.threads, num_scen);
  if (threads <= 1) {
    solve_range(0, num_scen);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      const int begin = static_cast<int>(static_cast<long long>(num_scen) * t / threads);
      const int end = static_cast<int>(static_cast<long long>(num_scen) * (t + 1) / threads);
      pool.emplace_back(solve_range, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  Step1Outcome out;
  for (int i = 0; i < num_scen; ++i) {
    if (suspect[i]) out.nonunique_suspect = true;
    if (status[i] == SubStatus::MaxIters) ++out.stalls;
    if (status[i] == SubStatus::SingularSystem && !out.failed) {
      out.failed = true;
      out.failed_scenario = i;
    }
  }
  return out;
}

}  // namespace

double stopping_error(const SviProblem& problem, const Policy& x) {
  if (problem.slcp) return slcp_stopping_error(*problem.slcp, x);

  // Stagewise aggregation: for each information group, the projected
  // residual of the conditional expectation of F, normalized like the SLCP
  // criterion. Requires stage-structured (non-custom) subspaces.
  const ScenarioSpace& sp = *problem.space;
  Policy xn = project_n(problem, x);
  Policy fx = eval_F(problem, xn);
  double err = 0.0;
  for (int k = 0; k < sp.num_stages(); ++k) {
    const int off = sp.stage_offset(k);
    const int dim = sp.stage_dim(k);
    if (dim == 0) continue;
    for (const ScenarioSpace::Group& g : sp.stage_groups(k)) {
      const int lead = g.members.front();
      Eigen::VectorXd block = xn.row(lead).segment(off, dim);
      Eigen::VectorXd agg = Eigen::VectorXd::Zero(dim);
      for (int i : g.members)
        agg += (sp.probability(i) / g.probability) *
               fx.row(i).segment(off, dim);
      Eigen::VectorXd lo = problem.sets[lead].lower().segment(off, dim);
      Eigen::VectorXd hi = problem.sets[lead].upper().segment(off, dim);
      Eigen::VectorXd proj = (block - agg).cwiseMax(lo).cwiseMin(hi);
      err = std::max(err, (block - proj).norm() / (1.0 + block.norm()));
    }
  }
  return err;
}

double rs_norm(const Policy& x, const Policy& w, double r, double s) {
  if (r <= s) throw std::invalid_argument("rs_norm needs r > s");
  const double nx2 = inner_product(x, x);
  const double nw2 = inner_product(w, w);
  return std::sqrt(nx2 + nw2 / (r * (r - s)));
}

SolveReport pha_solve(const SviProblem& problem, const PhaConfig& cfg,
                      const std::optional<Policy>& x0,
                      const std::optional<Policy>& w0) {
  cfg.validate();
  problem.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const double s = cfg.s_value();
  const double dual_step = cfg.rho * (cfg.r - s);

  Policy x = x0 ? *x0 : Policy::zero(problem.space);
  Policy w = w0 ? *w0 : Policy::zero(problem.space);
  if (x0) {
    Policy nx = project_n(problem, x);
    if ((x.values() - nx.values()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("x0 is not nonanticipative");
    x = std::move(nx);  // make membership exact
  }
  if (w0) {
    if (m_defect(problem, w) > 1e-9)
      throw std::invalid_argument("w0 is not in the multiplier subspace");
    w = project_m(problem, w);
  }

  SolveReport report;
  report.x_final = x;
  report.w_final = w;

  Eigen::MatrixXd xhat = x.values();  // doubles as the warm-start store
  double best_err = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  for (int k = 0; k < cfg.max_iter; ++k) {
    Step1Outcome step1 = run_step1(problem, cfg, x, w, xhat);
    if (step1.nonunique_suspect) report.nonunique_suspect = true;
    report.inner_stalls += step1.stalls;
    if (step1.failed) {
      report.status = SolveStatus::InnerFailure;
      report.failed_scenario = step1.failed_scenario;
      report.failed_iteration = k;
      report.iterations = k;
      break;
    }

    Policy xhat_policy(problem.space, xhat);
    Policy x_next = project_n(problem, xhat_policy);
    Eigen::MatrixXd w_values =
        w.values() + dual_step * (xhat - x_next.values());
    Policy w_next = project_m(problem, Policy(problem.space, std::move(w_values)));

    x = std::move(x_next);
    w = std::move(w_next);

    if (!problem.custom_iso_n_basis && !is_nonanticipative_exact(x))
      report.iterates_nonanticipative_exact = false;
    report.max_multiplier_defect =
        std::max(report.max_multiplier_defect, m_defect(problem, w));

    const double err = stopping_error(problem, x);
    report.iterations = k + 1;
    report.final_error = err;
    if (cfg.record_history) {
      report.error_history.push_back(err);
      report.rs_norm_history.push_back(rs_norm(x, w, cfg.r, s));
    }
    if (err <= cfg.tol) {
      report.status = SolveStatus::Converged;
      break;
    }
    if (cfg.stall_exit_window > 0) {
      if (err < 0.95 * best_err) {
        since_improvement = 0;
      } else if (++since_improvement >= cfg.stall_exit_window) {
        break;  // flatlined; reported as MaxIters
      }
      best_err = std::min(best_err, err);
    }
  }

  if (report.status == SolveStatus::InnerFailure)
    report.final_error = stopping_error(problem, x);
  report.x_final = std::move(x);
  report.w_final = std::move(w);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

}  // namespace svipha
