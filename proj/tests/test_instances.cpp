#include "svipha/instances.hpp"

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "svipha/json_io.hpp"

using namespace svipha;

TEST_CASE("structured first scenario of the generator") {
  for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
    GeneratorParams params{3, 3, 4, seed};
    Scenario1Draw draw;
    TwoStageSlcp slcp = gen_pseudo_slcp(params, &draw);

    CHECK(slcp.num_scenarios() == 4);
    CHECK((draw.a.array() > 0).all());
    CHECK((draw.b.array() < 0).all());
    CHECK(draw.alpha < -draw.b0);
    CHECK(draw.beta > -draw.a0);

    // rank at most two
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(slcp.m[0]);
    CHECK(svd.singularValues()[2] <= 1e-10);
    CHECK((slcp.m[0] - slcp.m[0].transpose()).cwiseAbs().maxCoeff() <= 1e-14);

    // offset assembled exactly from the draws
    Eigen::VectorXd expected = draw.b0 * draw.a + draw.a0 * draw.b +
                               draw.alpha * draw.a + draw.beta * draw.b;
    CHECK((slcp.q[0] - expected).cwiseAbs().maxCoeff() <= 1e-15);

    // remaining scenarios are positive semidefinite
    for (int k = 1; k < slcp.num_scenarios(); ++k) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(slcp.m[k]);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }

    double total = 0.0;
    for (double p : slcp.probabilities) {
      CHECK(p > 0.0);
      total += p;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("generation is a pure function of parameters and seed") {
  GeneratorParams params{4, 2, 5, 123};
  TwoStageSlcp a = gen_pseudo_slcp(params);
  TwoStageSlcp b = gen_pseudo_slcp(params);
  for (int i = 0; i < a.num_scenarios(); ++i) {
    CHECK(a.m[i] == b.m[i]);
    CHECK(a.q[i] == b.q[i]);
    CHECK(a.probabilities[i] == b.probabilities[i]);
  }
  params.seed = 124;
  TwoStageSlcp c = gen_pseudo_slcp(params);
  CHECK(a.m[0] != c.m[0]);
}

TEST_CASE("generated scenario maps pass the sampling falsifiers") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GeneratorParams params{2, 2, 3, seed};
    SviProblem problem = make_problem(gen_pseudo_slcp(params));
    CHECK(falsify_pseudomonotone(problem, 2000, seed * 31).empty());
  }
}

TEST_CASE("monotone variant is strongly monotone per scenario") {
  TwoStageSlcp slcp = gen_monotone_slcp(GeneratorParams{2, 2, 3, 8}, 0.1);
  for (const Eigen::MatrixXd& m : slcp.m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 *
                                                      (m + m.transpose()));
    CHECK(es.eigenvalues().minCoeff() >= 0.1 - 1e-12);
  }
}

TEST_CASE("market model data and reference solution") {
  OrangeMarket market = orange_market();
  REQUIRE(market.slcp.num_scenarios() == 3);
  CHECK(market.slcp.n1 == 1);
  CHECK(market.slcp.n2 == 3);
  CHECK(market.slcp.probabilities[0] == 0.5);
  CHECK(market.slcp.probabilities[1] == 0.3);
  CHECK(market.slcp.probabilities[2] == 0.2);

  // prices implied by the published quantities match the published prices
  Eigen::Vector2d p1 = market.price(0, market.quantities[0]);
  CHECK(p1[0] == doctest::Approx(7.1638).epsilon(1e-10));
  CHECK(p1[1] == doctest::Approx(3.7078).epsilon(1e-10));
  CHECK(std::abs(p1[0] - market.prices[0][0]) <= 0.01);
  CHECK(std::abs(p1[1] - market.prices[0][1]) <= 0.01);
  for (int i = 1; i < 3; ++i) {
    Eigen::Vector2d p = market.price(i, market.quantities[i]);
    CHECK(std::abs(p[0] - market.prices[i][0]) <= 0.01);
    CHECK(std::abs(p[1] - market.prices[i][1]) <= 0.01);
  }

  // conversion constraint at the published scenario-1 point
  CHECK(market.supply_quantity - 2 * market.quantities[0][0] -
            market.quantities[0][1] ==
        0.0);

  // stationarity multipliers recovered from the data
  CHECK(market.multipliers[0] == doctest::Approx(3.4138).epsilon(1e-10));
  CHECK(market.multipliers[1] == doctest::Approx(3.2175).epsilon(1e-10));
  CHECK(market.multipliers[2] == doctest::Approx(3.6016).epsilon(1e-10));

  // the expected multiplier matches the supply stationarity level
  double mean_eta = 0.0;
  for (int i = 0; i < 3; ++i)
    mean_eta += market.slcp.probabilities[i] * market.multipliers[i];
  CHECK(mean_eta == doctest::Approx(0.001 * 393 + 3).epsilon(1e-3));

  // the checked-in fixture is the same instance
  SviProblem from_fixture =
      load_instance(std::string(SVIPHA_FIXTURE_DIR) + "/orange_market.json");
  REQUIRE(from_fixture.slcp != nullptr);
  for (int i = 0; i < 3; ++i) {
    CHECK(from_fixture.slcp->m[i] == market.slcp.m[i]);
    CHECK(from_fixture.slcp->q[i] == market.slcp.q[i]);
  }
}

TEST_CASE("textbook examples come with their expected certificates") {
  for (const TextbookExample& ex : textbook_examples()) {
    EvalGrid grid = EvalGrid::affine_point(ex.problem);
    ElicitationReport report = [&] {
      switch (ex.expected_criterion) {
        case Criterion::Coupling:
          return check_coupling(ex.problem, grid);
        case Criterion::CommutingSpectrum:
          return check_commuting_spectrum(ex.problem, grid);
        case Criterion::EigenvalueMultiplicity:
          return check_eigenvalue_multiplicity(ex.problem, grid,
                                               ex.level_parameter);
        default:
          throw std::logic_error("unexpected criterion in fixtures");
      }
    }();
    INFO(ex.name);
    REQUIRE(report.applicable);
    CHECK(*report.level_bound ==
          doctest::Approx(ex.expected_bound).epsilon(1e-10));
    if (ex.expected_multiplicity > 0)
      CHECK(report.min_multiplicity == ex.expected_multiplicity);
  }
}

TEST_CASE("generator rejects bad parameters") {
  CHECK_THROWS_AS(gen_pseudo_slcp(GeneratorParams{0, 1, 1, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_pseudo_slcp(GeneratorParams{1, 1, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_monotone_slcp(GeneratorParams{1, 1, 1, 0}, -1.0),
                  std::invalid_argument);
}
