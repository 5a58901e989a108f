#include "svipha/scenario_space.hpp"

#include "doctest.h"
#include "helpers.hpp"

using namespace svipha;

TEST_CASE("inner product is the probability-weighted sum") {
  auto space = ScenarioSpace::two_stage(1, 0, {0.5, 0.5});
  Policy x(space, (Eigen::MatrixXd(2, 1) << 2, 4).finished());
  Policy y(space, (Eigen::MatrixXd(2, 1) << 1, 1).finished());
  CHECK(inner_product(x, y) == doctest::Approx(3.0).epsilon(1e-14));

  Policy z = Policy::zero(space);
  CHECK(inner_product(z, z) == 0.0);

  auto space3 = ScenarioSpace::two_stage(1, 0, {0.5, 0.3, 0.2});
  Policy a(space3, (Eigen::MatrixXd(3, 1) << 1, 2, 3).finished());
  Policy e(space3, Eigen::MatrixXd::Ones(3, 1));
  CHECK(inner_product(a, e) == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("nonanticipative projection averages the first stage") {
  auto space = ScenarioSpace::two_stage(1, 1, {0.5, 0.3, 0.2});
  Eigen::MatrixXd values(3, 2);
  values << 1, 9, 2, 8, 3, 7;
  Policy x(space, values);
  Policy proj = project_nonanticipative(x);
  for (int i = 0; i < 3; ++i) {
    CHECK(proj.values()(i, 0) == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(proj.values()(i, 1) == values(i, 1));  // second stage untouched
  }
  CHECK(is_nonanticipative_exact(proj));

  // idempotence, bitwise: the group value is written once
  Policy twice = project_nonanticipative(proj);
  CHECK(twice.values() == proj.values());

  auto space2 = ScenarioSpace::two_stage(1, 0, {0.25, 0.75});
  Policy y(space2, (Eigen::MatrixXd(2, 1) << 4, 0).finished());
  Policy py = project_nonanticipative(y);
  CHECK(py.values()(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(py.values()(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("multiplier projection is the complement") {
  auto space = ScenarioSpace::two_stage(1, 0, {0.5, 0.5});
  Policy x(space, (Eigen::MatrixXd(2, 1) << 4, 0).finished());
  Policy m = project_multiplier(x);
  CHECK(m.values()(0, 0) == doctest::Approx(2.0));
  CHECK(m.values()(1, 0) == doctest::Approx(-2.0));
  CHECK(multiplier_defect(m) <= 1e-12);

  Policy in_n = project_nonanticipative(x);
  Policy zero = project_multiplier(in_n);
  CHECK(zero.values().cwiseAbs().maxCoeff() <= 1e-15);

  Rng rng(7);
  auto tree = testing::random_tree(rng);
  Policy r = testing::random_policy(tree, rng);
  Policy sum(tree, project_nonanticipative(r).values() +
                       project_multiplier(r).values());
  CHECK((sum.values() - r.values()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("isometry scales blocks by root probability") {
  auto single = ScenarioSpace::deterministic(1);
  Policy x(single, (Eigen::MatrixXd(1, 1) << 3).finished());
  CHECK(to_iso(x)[0] == 3.0);

  // probability 1 is forced for a lone scenario, so scale through a
  // two-scenario space
  auto space = ScenarioSpace::two_stage(1, 0, {0.25, 0.75});
  Policy y(space, (Eigen::MatrixXd(2, 1) << 2, 0).finished());
  CHECK(to_iso(y)[0] == doctest::Approx(1.0).epsilon(1e-15));  // sqrt(.25)*2

  auto half = ScenarioSpace::two_stage(1, 0, {0.5, 0.5});
  Policy ones(half, Eigen::MatrixXd::Ones(2, 1));
  CHECK(to_iso(ones).norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(to_iso(ones).norm() ==
        doctest::Approx(policy_norm(ones)).epsilon(1e-15));

  Rng rng(3);
  auto tree = testing::random_tree(rng);
  Policy r = testing::random_policy(tree, rng);
  Policy back = from_iso(tree, to_iso(r));
  CHECK((back.values() - r.values()).cwiseAbs().maxCoeff() <= 1e-15);

  CHECK_THROWS_AS(from_iso(tree, Eigen::VectorXd::Zero(tree->iso_dim() + 1)),
                  std::invalid_argument);
}

TEST_CASE("projection matrices in flat coordinates") {
  auto space = ScenarioSpace::two_stage(1, 0, {0.5, 0.5});
  Eigen::MatrixXd pn = iso_projection_matrix(*space, Subspace::Nonanticipative);
  Eigen::MatrixXd expected(2, 2);
  expected << 0.5, 0.5, 0.5, 0.5;
  CHECK((pn - expected).cwiseAbs().maxCoeff() <= 1e-15);

  auto single = ScenarioSpace::deterministic(2);
  Eigen::MatrixXd pn1 = iso_projection_matrix(*single, Subspace::Nonanticipative);
  Eigen::MatrixXd pm1 = iso_projection_matrix(*single, Subspace::Multiplier);
  CHECK((pn1 - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(pm1.cwiseAbs().maxCoeff() <= 1e-15);

  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto tree = testing::random_tree(rng);
    Eigen::MatrixXd pm = iso_projection_matrix(*tree, Subspace::Multiplier);
    Policy r = testing::random_policy(tree, rng);
    Eigen::VectorXd lhs = pm * to_iso(r);
    Eigen::VectorXd rhs = to_iso(project_multiplier(r));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);

    // symmetric and idempotent
    CHECK((pm - pm.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((pm * pm - pm).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("subspace bases are orthonormal and complementary") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    auto tree = testing::random_tree(rng);
    Eigen::MatrixXd bn = iso_nonanticipative_basis(*tree);
    Eigen::MatrixXd bm = iso_multiplier_basis(*tree);
    Eigen::MatrixXd gn = bn.transpose() * bn;
    CHECK((gn - Eigen::MatrixXd::Identity(gn.rows(), gn.cols()))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
    if (bm.cols() > 0) {
      Eigen::MatrixXd gm = bm.transpose() * bm;
      CHECK((gm - Eigen::MatrixXd::Identity(gm.rows(), gm.cols()))
                .cwiseAbs()
                .maxCoeff() <= 1e-10);
    }
    CHECK(bn.cols() + bm.cols() == tree->iso_dim());
  }
}

TEST_CASE("construction rejects bad inputs") {
  CHECK_THROWS_AS(ScenarioSpace::two_stage(1, 1, {0.5, 0.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScenarioSpace::two_stage(1, 1, {1.5, -0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScenarioSpace::two_stage(1, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(ScenarioSpace::create({0, 0}, {Scenario{1.0, {0}}}),
                  std::invalid_argument);

  // probability sum off by more than 1e-12 is rejected, not renormalized
  CHECK_THROWS_AS(ScenarioSpace::two_stage(1, 0, {0.5, 0.5 + 1e-9}),
                  std::invalid_argument);

  auto space = ScenarioSpace::two_stage(1, 1, {0.5, 0.5});
  CHECK_THROWS_AS(Policy(space, Eigen::MatrixXd::Zero(3, 2)),
                  std::invalid_argument);
  Eigen::MatrixXd nan_values = Eigen::MatrixXd::Zero(2, 2);
  nan_values(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Policy(space, nan_values), std::invalid_argument);
}

TEST_CASE("projection algebra on random trees") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto tree = testing::random_tree(rng);
    Policy x = testing::random_policy(tree, rng);
    Policy y = testing::random_policy(tree, rng);

    Policy nx = project_nonanticipative(x);
    Policy mx = project_multiplier(x);

    // self-adjointness of the projection
    const double lhs = inner_product(nx, y);
    const double rhs = inner_product(x, project_nonanticipative(y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + policy_norm(x) * policy_norm(y)));

    // orthogonality of the split
    CHECK(std::abs(inner_product(nx, project_multiplier(y))) <= 1e-12);

    // isometry of the flat embedding
    CHECK(std::abs(to_iso(x).dot(to_iso(y)) - inner_product(x, y)) <= 1e-12);
  }
}
