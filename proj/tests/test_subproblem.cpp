#include "svipha/subproblem.hpp"

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "svipha/oracle.hpp"

using namespace svipha;

namespace {

SubproblemSpec scalar_spec(double slope, double offset, double w, double r,
                           double anchor) {
  return SubproblemSpec{
      ScenarioMap::affine_map(Eigen::MatrixXd::Constant(1, 1, slope),
                              Eigen::VectorXd::Constant(1, offset)),
      FeasibleSet::orthant(1), Eigen::VectorXd::Constant(1, w),
      Eigen::VectorXd::Constant(1, anchor), r};
}

}  // namespace

TEST_CASE("scalar closed forms") {
  // G(x) = (x + 1) + (x - 3) = 2x - 2, solved by x = 1
  SubproblemResult interior = solve_scenario_subproblem(
      scalar_spec(1.0, 1.0, 0.0, 1.0, 3.0), Eigen::VectorXd::Zero(1));
  CHECK(interior.status == SubStatus::Converged);
  CHECK(interior.x[0] == doctest::Approx(1.0).epsilon(1e-10));

  // G(0) = 5 > 0: corner solution
  SubproblemResult corner = solve_scenario_subproblem(
      scalar_spec(1.0, 5.0, 0.0, 1.0, 0.0), Eigen::VectorXd::Constant(1, 2.0));
  CHECK(corner.status == SubStatus::Converged);
  CHECK(corner.x[0] == doctest::Approx(0.0));
}

TEST_CASE("matches pattern enumeration on strongly monotone problems") {
  Rng rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(8));
    Eigen::MatrixXd m = testing::random_strongly_monotone(n, rng);
    Eigen::VectorXd q = testing::random_vector(n, rng, -2, 2);
    Eigen::VectorXd w = testing::random_vector(n, rng);
    Eigen::VectorXd anchor = testing::random_vector(n, rng, 0, 2);
    const double r = 1.0;

    SubproblemSpec spec{ScenarioMap::affine_map(m, q), FeasibleSet::orthant(n),
                        w, anchor, r};
    SubproblemResult res = solve_scenario_subproblem(
        spec, testing::random_vector(n, rng, 0, 1));
    REQUIRE(res.status == SubStatus::Converged);

    Eigen::MatrixXd g = m + r * Eigen::MatrixXd::Identity(n, n);
    auto expected = oracle::lcp_enumerate(g, q + w - r * anchor);
    REQUIRE(expected.solutions.size() == 1);
    CHECK((res.x - expected.solutions[0]).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("warm start independence once r dominates the symmetric part") {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(5));
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-2, 2);
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const double r = 1.5 * std::max(std::abs(es.eigenvalues().minCoeff()),
                                    std::abs(es.eigenvalues().maxCoeff()));

    SubproblemSpec spec{ScenarioMap::affine_map(
                            m, testing::random_vector(n, rng, -2, 2)),
                        FeasibleSet::orthant(n), testing::random_vector(n, rng),
                        testing::random_vector(n, rng, 0, 2), r};
    SubproblemResult a = solve_scenario_subproblem(
        spec, Eigen::VectorXd::Zero(n));
    SubproblemResult b = solve_scenario_subproblem(
        spec, testing::random_vector(n, rng, 0, 5));
    REQUIRE(a.status == SubStatus::Converged);
    REQUIRE(b.status == SubStatus::Converged);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("a satisfying warm start takes zero iterations") {
  SubproblemSpec spec = scalar_spec(1.0, 1.0, 0.0, 1.0, 3.0);
  SubproblemResult res =
      solve_scenario_subproblem(spec, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(res.status == SubStatus::Converged);
  CHECK(res.newton_iters == 0);
  CHECK(res.x[0] == 1.0);
}

TEST_CASE("box constraints through the nested reformulation") {
  Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(6));
    Eigen::MatrixXd m = testing::random_strongly_monotone(n, rng);
    Eigen::VectorXd lo = testing::random_vector(n, rng, -2, 0);
    Eigen::VectorXd hi = lo + testing::random_vector(n, rng, 0.5, 3).cwiseAbs();
    SubproblemSpec spec{ScenarioMap::affine_map(
                            m, testing::random_vector(n, rng, -3, 3)),
                        FeasibleSet::box(lo, hi),
                        Eigen::VectorXd::Zero(n),
                        Eigen::VectorXd::Zero(n),
                        0.5};
    SubproblemResult res =
        solve_scenario_subproblem(spec, 0.5 * (lo + hi));
    REQUIRE(res.status == SubStatus::Converged);

    // independent certificate: the natural-map residual of the box system
    Eigen::VectorXd target = res.x - (spec.map.eval(res.x) + spec.w +
                                      0.5 * (res.x - spec.x_anchor));
    Eigen::VectorXd natural = res.x - spec.set.project(target);
    CHECK(natural.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("preconditions are enforced") {
  SubproblemSpec spec = scalar_spec(1.0, 1.0, 0.0, -1.0, 0.0);
  CHECK_THROWS_AS(
      solve_scenario_subproblem(spec, Eigen::VectorXd::Zero(1)),
      std::invalid_argument);
  SubproblemSpec ok = scalar_spec(1.0, 1.0, 0.0, 1.0, 0.0);
  CHECK_THROWS_AS(
      solve_scenario_subproblem(
          ok, Eigen::VectorXd::Constant(
                  1, std::numeric_limits<double>::quiet_NaN())),
      std::invalid_argument);
}

TEST_CASE("caps out gracefully on an unsolvable system") {
  // G(x) = -x - 1 + 0.5 x ... a map pushing everything negative: the
  // complementarity system 0 <= x perp -0.5x - 1 >= 0 has no solution.
  SubproblemSpec spec = scalar_spec(-1.0, -1.0, 0.0, 0.5, 0.0);
  SubproblemResult res =
      solve_scenario_subproblem(spec, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(res.status == SubStatus::MaxIters);
  CHECK(res.x.allFinite());
}
