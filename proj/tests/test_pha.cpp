#include "svipha/pha.hpp"

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "svipha/instances.hpp"
#include "svipha/oracle.hpp"

using namespace svipha;

namespace {

TwoStageSlcp replicated(int num_scen) {
  TwoStageSlcp slcp;
  slcp.n1 = 1;
  slcp.n2 = 1;
  for (int i = 0; i < num_scen; ++i) {
    slcp.m.push_back(Eigen::MatrixXd::Identity(2, 2));
    slcp.q.push_back(Eigen::VectorXd::Constant(2, -1.0));
    slcp.probabilities.push_back(1.0 / num_scen);
  }
  return slcp;
}

}  // namespace

TEST_CASE("config validation") {
  PhaConfig cfg;
  cfg.r = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.r = 1.0;
  cfg.s = 1.0;  // needs s < r
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.s = 0.5;
  cfg.rho = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.rho = 1.618;
  cfg.validate();
  CHECK(PhaConfig{}.s_value() == doctest::Approx(0.5));
}

TEST_CASE("replicated deterministic problem converges to the shared point") {
  SviProblem problem = make_problem(replicated(2));
  PhaConfig cfg;
  cfg.r = 1.0;
  SolveReport rep = pha_solve(problem, cfg);
  CHECK(rep.status == SolveStatus::Converged);
  CHECK(rep.final_error <= cfg.tol);
  for (int i = 0; i < 2; ++i) {
    CHECK(rep.x_final.values()(i, 0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(rep.x_final.values()(i, 1) == doctest::Approx(1.0).epsilon(1e-4));
  }
  CHECK(rep.w_final.values().cwiseAbs().maxCoeff() <= 1e-4);
  CHECK(rep.iterates_nonanticipative_exact);
  CHECK(rep.max_multiplier_defect <= 1e-10);
}

TEST_CASE("solution matches the aggregated enumeration oracle") {
  GeneratorParams params{1, 1, 2, 77};
  TwoStageSlcp slcp = gen_monotone_slcp(params);
  SviProblem problem = make_problem(slcp);
  PhaConfig cfg;
  cfg.r = 1.0;
  cfg.tol = 1e-9;
  cfg.max_iter = 50000;
  SolveReport rep = pha_solve(problem, cfg);
  REQUIRE(rep.status == SolveStatus::Converged);

  auto sols = oracle::extensive_slcp_oracle(slcp);
  REQUIRE(sols.size() == 1);
  CHECK(std::abs(sols[0].x1[0] - rep.x_final.values()(0, 0)) <= 1e-5);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(sols[0].x2(i, 0) - rep.x_final.values()(i, 1)) <= 1e-5);
}

TEST_CASE("dual update wiring matches the hand formula") {
  // one outer iteration, recomputed manually
  TwoStageSlcp slcp = gen_monotone_slcp(GeneratorParams{1, 1, 2, 5});
  SviProblem problem = make_problem(slcp);
  PhaConfig cfg;
  cfg.r = 2.0;
  cfg.s = 0.0;
  cfg.rho = 1.0;  // classical update w += r * (xhat - x)
  cfg.max_iter = 1;
  cfg.tol = 1e-30;
  SolveReport rep = pha_solve(problem, cfg);

  Eigen::MatrixXd xhat(2, 2);
  for (int i = 0; i < 2; ++i) {
    SubproblemSpec spec{problem.maps[i], problem.sets[i],
                        Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
                        cfg.r};
    xhat.row(i) =
        solve_scenario_subproblem(spec, Eigen::VectorXd::Zero(2), cfg.inner)
            .x.transpose();
  }
  Policy xhat_policy(problem.space, xhat);
  Policy x1 = project_nonanticipative(xhat_policy);
  Policy w1 = project_multiplier(Policy(
      problem.space, Eigen::MatrixXd(cfg.r * (xhat - x1.values()))));
  CHECK((rep.x_final.values() - x1.values()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((rep.w_final.values() - w1.values()).cwiseAbs().maxCoeff() <= 1e-12);

  // the decoupling direction lives in the multiplier subspace
  Policy dir(problem.space, xhat - x1.values());
  CHECK(multiplier_defect(dir) <= 1e-12);
}

TEST_CASE("stopping error agrees with the SLCP form on SLCP instances") {
  Rng rng(2);
  TwoStageSlcp slcp = gen_monotone_slcp(GeneratorParams{2, 2, 3, 9});
  SviProblem problem = make_problem(slcp);
  SviProblem generic = problem;
  generic.slcp = nullptr;  // force the stagewise-aggregation path
  for (int trial = 0; trial < 10; ++trial) {
    Policy x = testing::random_policy(problem.space, rng);
    const double a = stopping_error(problem, x);
    const double b = stopping_error(generic, x);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("rs norm") {
  auto space = ScenarioSpace::two_stage(1, 0, {0.5, 0.5});
  Policy x(space, (Eigen::MatrixXd(2, 1) << 1, 1).finished());
  Policy w = Policy::zero(space);
  CHECK(rs_norm(x, w, 2.0, 1.0) == doctest::Approx(policy_norm(x)));

  Policy w2(space, (Eigen::MatrixXd(2, 1) << std::sqrt(2.0), std::sqrt(2.0))
                       .finished());
  CHECK(rs_norm(Policy::zero(space), w2, 2.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rs_norm(x, w2, 2.0, 1.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(rs_norm(x, w, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("initial points are validated and report invariants hold") {
  SviProblem problem = make_problem(replicated(3));
  PhaConfig cfg;
  cfg.r = 1.0;

  Eigen::MatrixXd bad(3, 2);
  bad << 1, 0, 2, 0, 3, 0;  // first stage differs across scenarios
  CHECK_THROWS_AS(
      pha_solve(problem, cfg, Policy(problem.space, bad), std::nullopt),
      std::invalid_argument);
  CHECK_THROWS_AS(
      pha_solve(problem, cfg, std::nullopt,
                Policy::constant(problem.space, Eigen::Vector2d(1, 1))),
      std::invalid_argument);

  SolveReport rep = pha_solve(problem, cfg);
  REQUIRE(rep.status == SolveStatus::Converged);
  CHECK(is_nonanticipative_exact(rep.x_final));
  CHECK(multiplier_defect(rep.w_final) <= 1e-10);
  CHECK(rep.error_history.size() == static_cast<std::size_t>(rep.iterations));
  CHECK(rep.rs_norm_history.size() == rep.error_history.size());
}

TEST_CASE("single-threaded and multi-threaded runs agree bitwise") {
  TwoStageSlcp slcp = gen_monotone_slcp(GeneratorParams{2, 2, 6, 13});
  SviProblem problem = make_problem(slcp);
  PhaConfig cfg;
  cfg.r = 2.0;
  SolveReport a = pha_solve(problem, cfg);
  cfg.threads = 3;
  SolveReport b = pha_solve(problem, cfg);
  REQUIRE(a.status == SolveStatus::Converged);
  CHECK(a.iterations == b.iterations);
  CHECK(a.x_final.values() == b.x_final.values());
  CHECK(a.w_final.values() == b.w_final.values());
}

TEST_CASE("market instance converges to the aggregated solution") {
  SviProblem problem = make_problem(orange_market().slcp);
  PhaConfig cfg;
  cfg.r = 1.0;
  cfg.max_iter = 20000;
  SolveReport rep = pha_solve(problem, cfg);
  REQUIRE(rep.status == SolveStatus::Converged);
  // the tol=1e-5 iterate sits within a couple units of the exact point
  CHECK(rep.x_final.values()(0, 0) == doctest::Approx(393.43).epsilon(0.01));
  CHECK(rep.iterates_nonanticipative_exact);
  CHECK(rep.max_multiplier_defect <= 1e-10);
}
