#include "svipha/subproblem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace svipha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fb(double a, double b) { return std::sqrt(a * a + b * b) - a - b; }

// Partial derivatives of fb. At the kink (a,b) = (0,0) the limiting element
// along the diagonal direction is selected.
struct FbPartials {
  double da, db;
};

FbPartials fb_partials(double a, double b, double delta) {
  const double rho = std::hypot(a, b);
  if (rho <= delta) {
    const double s = 1.0 / std::sqrt(2.0);
    return {s - 1.0, s - 1.0};
  }
  return {a / rho - 1.0, b / rho - 1.0};
}

struct Residual {
  Eigen::VectorXd g;    // G(x) = F(x) + w + r (x - anchor)
  Eigen::VectorXd phi;  // FB residual
};

Residual eval_residual(const SubproblemSpec& spec, const Eigen::VectorXd& x) {
  Residual out;
  out.g = spec.map.eval(x) + spec.w + spec.r * (x - spec.x_anchor);
  const Eigen::VectorXd& lo = spec.set.lower();
  const Eigen::VectorXd& hi = spec.set.upper();
  out.phi.resize(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double gi = out.g[i];
    if (lo[i] == -kInf && hi[i] == kInf) {
      out.phi[i] = gi;
    } else if (lo[i] == -kInf) {
      out.phi[i] = -fb(hi[i] - x[i], -gi);
    } else if (hi[i] == kInf) {
      out.phi[i] = fb(x[i] - lo[i], gi);
    } else {
      out.phi[i] = fb(x[i] - lo[i], fb(hi[i] - x[i], -gi));
    }
  }
  return out;
}

// An element of the B-subdifferential of the FB residual.
Eigen::MatrixXd eval_jacobian(const SubproblemSpec& spec,
                              const Eigen::VectorXd& x,
                              const Eigen::VectorXd& g, double delta) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd dg = spec.map.jac(x);
  dg.diagonal().array() += spec.r;

  const Eigen::VectorXd& lo = spec.set.lower();
  const Eigen::VectorXd& hi = spec.set.upper();
  Eigen::MatrixXd jac(n, n);
  for (int i = 0; i < n; ++i) {
    if (lo[i] == -kInf && hi[i] == kInf) {
      jac.row(i) = dg.row(i);
    } else if (lo[i] == -kInf) {
      FbPartials p = fb_partials(hi[i] - x[i], -g[i], delta);
      jac.row(i) = p.db * dg.row(i);
      jac(i, i) += p.da;
    } else if (hi[i] == kInf) {
      FbPartials p = fb_partials(x[i] - lo[i], g[i], delta);
      jac.row(i) = p.db * dg.row(i);
      jac(i, i) += p.da;
    } else {
      const double inner = fb(hi[i] - x[i], -g[i]);
      FbPartials pin = fb_partials(hi[i] - x[i], -g[i], delta);
      FbPartials pout = fb_partials(x[i] - lo[i], inner, delta);
      jac.row(i) = -pout.db * pin.db * dg.row(i);
      jac(i, i) += pout.da - pout.db * pin.da;
    }
  }
  return jac;
}

}  // namespace

Eigen::VectorXd fb_residual(const SubproblemSpec& spec,
                            const Eigen::VectorXd& x) {
  return eval_residual(spec, x).phi;
}

SubproblemResult solve_scenario_subproblem(const SubproblemSpec& spec,
                                           const Eigen::VectorXd& warm_start,
                                           const NewtonConfig& cfg) {
  if (spec.r <= 0.0)
    throw std::invalid_argument("proximal parameter r must be positive");
  if (!warm_start.allFinite())
    throw std::invalid_argument("warm start must be finite");

  SubproblemResult result;
  Eigen::VectorXd x = warm_start;
  Residual res = eval_residual(spec, x);
  if (!res.phi.allFinite()) {
    // Warm start overflowed the map; fall back to the anchor.
    x = spec.x_anchor;
    res = eval_residual(spec, x);
    if (!res.phi.allFinite()) {
      result.status = SubStatus::MaxIters;
      result.x = x;
      result.residual = kInf;
      return result;
    }
  }
  double merit = 0.5 * res.phi.squaredNorm();
  double watchdog_merit = kInf;

  result.residual = res.phi.cwiseAbs().maxCoeff();
  if (result.residual <= cfg.inner_tol) {
    result.x = std::move(x);
    return result;  // warm start already solves the inclusion
  }

  Eigen::VectorXd best_x = x;
  double best_residual = result.residual;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    Eigen::MatrixXd jac = eval_jacobian(spec, x, res.g, cfg.kink_delta);
    if (!jac.allFinite()) {
      result.status = SubStatus::MaxIters;
      result.x = best_x;
      result.residual = best_residual;
      result.newton_iters = iter;
      return result;
    }
    Eigen::VectorXd dir = jac.partialPivLu().solve(-res.phi);
    bool ok = dir.allFinite() &&
              (jac * dir + res.phi).cwiseAbs().maxCoeff() <=
                  1e-8 * (1.0 + res.phi.cwiseAbs().maxCoeff());
    if (!ok) {
      Eigen::MatrixXd reg = jac;
      reg.diagonal().array() += 1e-10;
      dir = reg.partialPivLu().solve(-res.phi);
      if (!dir.allFinite()) {
        result.status = SubStatus::SingularSystem;
        result.x = best_x;
        result.residual = best_residual;
        result.newton_iters = iter;
        return result;
      }
    }

    Eigen::VectorXd grad = jac.transpose() * res.phi;
    double slope = grad.dot(dir);
    if (slope >= 0.0) {
      // Not a descent direction for the merit; fall back to steepest descent.
      dir = -grad;
      slope = -grad.squaredNorm();
      result.nonunique_suspect = true;
    }

    double t = 1.0;
    Eigen::VectorXd x_trial;
    Residual trial;
    double trial_merit = kInf;
    while (t >= cfg.min_step) {
      x_trial = x + t * dir;
      trial = eval_residual(spec, x_trial);
      trial_merit = trial.phi.allFinite() ? 0.5 * trial.phi.squaredNorm() : kInf;
      if (trial_merit <= merit + cfg.armijo_slope * t * slope) break;
      t *= cfg.backtrack;
    }
    if (t < cfg.min_step) {
      // Watchdog: accept the full step even though the merit rises, and
      // remember the level it rose from.
      x_trial = x + dir;
      trial = eval_residual(spec, x_trial);
      trial_merit = trial.phi.allFinite() ? 0.5 * trial.phi.squaredNorm() : kInf;
      if (trial_merit == kInf) {
        // Overflowed territory: hand back the best point seen.
        result.status = SubStatus::MaxIters;
        result.x = best_x;
        result.residual = best_residual;
        result.newton_iters = iter + 1;
        return result;
      }
      watchdog_merit = std::min(watchdog_merit, merit);
    }
    x = std::move(x_trial);
    res = std::move(trial);
    merit = trial_merit;
    if (watchdog_merit != kInf && merit < watchdog_merit)
      result.nonunique_suspect = true;  // merit rose, then recovered

    result.newton_iters = iter + 1;
    result.residual = res.phi.cwiseAbs().maxCoeff();
    if (result.residual < best_residual) {
      best_residual = result.residual;
      best_x = x;
    }
    if (result.residual <= cfg.inner_tol) {
      result.x = std::move(x);
      return result;
    }
  }

  result.status = SubStatus::MaxIters;
  result.x = best_x;
  result.residual = best_residual;
  return result;
}

}  // namespace svipha
