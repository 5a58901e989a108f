#include "svipha/instances.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "svipha/rng.hpp"

namespace svipha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> draw_probabilities(int count, Rng& rng) {
  std::vector<double> p(count);
  double total = 0.0;
  for (double& v : p) {
    v = rng.uniform01();
    total += v;
  }
  for (double& v : p) v /= total;
  // Absorb the last rounding crumb so the sum is exactly 1.
  double sum = 0.0;
  for (int i = 0; i + 1 < count; ++i) sum += p[i];
  p[count - 1] = 1.0 - sum;
  return p;
}

Eigen::MatrixXd psd_scenario_matrix(int n, Rng& rng) {
  const int terms = (3 * n + 3) / 4;  // ceil(3n/4)
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int t = 0; t < terms; ++t) {
    const double weight = rng.uniform(0.1, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
    // Unnormalized directions damped by 1/10; matrix norms grow like n/5.
    m.noalias() += 0.1 * weight * v * v.transpose();
  }
  return m;
}

}  // namespace

TwoStageSlcp gen_pseudo_slcp(const GeneratorParams& params,
                             Scenario1Draw* draw) {
  if (params.n1 < 1 || params.n2 < 1)
    throw std::invalid_argument("stage dimensions must be at least 1");
  if (params.num_scenarios < 1)
    throw std::invalid_argument("at least one scenario required");

  Rng rng(params.seed);
  const int n = params.n1 + params.n2;
  TwoStageSlcp slcp;
  slcp.n1 = params.n1;
  slcp.n2 = params.n2;

  // Scenario 1: rank-2 structured map. Near-parallel (a, b) pairs make the
  // matrix numerically rank-1, so resample on a cosine threshold.
  Eigen::VectorXd a(n), b(n);
  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    for (int i = 0; i < n; ++i) a[i] = rng.uniform01();
    for (int i = 0; i < n; ++i) b[i] = -rng.uniform01();
    const double cosine = a.dot(b) / (a.norm() * b.norm());
    ok = std::abs(cosine) <= 0.99;
  }
  if (!ok)
    throw std::runtime_error("could not draw a non-parallel vector pair");

  const double a0 = rng.uniform01();
  const double b0 = rng.uniform01();
  const double alpha = -b0 - rng.uniform(0.1, 1.0);
  const double beta = -a0 + rng.uniform(0.1, 1.0);
  if (draw) *draw = {a, b, a0, b0, alpha, beta};

  slcp.m.push_back(a * b.transpose() + b * a.transpose());
  slcp.q.push_back(b0 * a + a0 * b + alpha * a + beta * b);

  for (int k = 1; k < params.num_scenarios; ++k) {
    slcp.m.push_back(psd_scenario_matrix(n, rng));
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = rng.uniform(-1.0, 1.0);
    slcp.q.push_back(q);
  }

  slcp.probabilities = draw_probabilities(params.num_scenarios, rng);
  slcp.validate();
  return slcp;
}

TwoStageSlcp gen_monotone_slcp(const GeneratorParams& params, double ridge) {
  if (params.n1 < 1 || params.n2 < 1)
    throw std::invalid_argument("stage dimensions must be at least 1");
  if (params.num_scenarios < 1)
    throw std::invalid_argument("at least one scenario required");
  if (ridge <= 0.0) throw std::invalid_argument("ridge must be positive");

  Rng rng(params.seed);
  const int n = params.n1 + params.n2;
  TwoStageSlcp slcp;
  slcp.n1 = params.n1;
  slcp.n2 = params.n2;
  for (int k = 0; k < params.num_scenarios; ++k) {
    slcp.m.push_back(psd_scenario_matrix(n, rng) +
                     ridge * Eigen::MatrixXd::Identity(n, n));
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = rng.uniform(-1.0, 1.0);
    slcp.q.push_back(q);
  }
  slcp.probabilities = draw_probabilities(params.num_scenarios, rng);
  slcp.validate();
  return slcp;
}

OrangeMarket orange_market() {
  OrangeMarket market;
  market.demand_m = {
      (Eigen::Matrix2d() << -0.005, -0.0002, -0.0002, -0.001).finished(),
      (Eigen::Matrix2d() << -0.004, -0.0001, -0.0001, -0.0005).finished(),
      (Eigen::Matrix2d() << -0.006, -0.0003, -0.0003, -0.0015).finished()};
  market.demand_q = {Eigen::Vector2d(7.5, 4.0), Eigen::Vector2d(7.0, 3.5),
                     Eigen::Vector2d(8.0, 4.5)};

  market.slcp.n1 = 1;
  market.slcp.n2 = 3;
  market.slcp.probabilities = {0.5, 0.3, 0.2};
  for (int i = 0; i < 3; ++i) {
    const Eigen::Matrix2d& d = market.demand_m[i];
    Eigen::MatrixXd m(4, 4);
    // Supply stationarity, two demand stationarity rows (the concave revenue
    // terms enter with negated sign), and the conversion constraint.
    m << 0.001, 0.0, 0.0, -1.0,
         0.0, -2.0 * d(0, 0), -2.0 * d(0, 1), 2.0,
         0.0, -2.0 * d(1, 0), -2.0 * d(1, 1), 1.0,
         1.0, -2.0, -1.0, 0.0;
    Eigen::VectorXd q(4);
    q << 3.0, -market.demand_q[i][0], -market.demand_q[i][1], 0.0;
    market.slcp.m.push_back(m);
    market.slcp.q.push_back(q);
  }
  market.slcp.validate();

  market.supply_quantity = 393.0;
  market.quantities = {Eigen::Vector2d(56.0, 281.0),
                       Eigen::Vector2d(64.0, 265.0),
                       Eigen::Vector2d(52.0, 288.0)};
  market.prices = {Eigen::Vector2d(7.16, 3.71), Eigen::Vector2d(6.72, 3.36),
                   Eigen::Vector2d(7.60, 4.05)};
  // Multipliers recovered from the juice stationarity row at the reference
  // quantities: eta = d(0,:) * (Q_J, Q_F) + q_J / 2.
  market.multipliers.clear();
  for (int i = 0; i < 3; ++i)
    market.multipliers.push_back(
        market.demand_m[i].row(0).dot(market.quantities[i]) +
        0.5 * market.demand_q[i][0]);
  return market;
}

namespace {

SviProblem single_scenario_problem(const Eigen::MatrixXd& m,
                                   const Eigen::VectorXd& q,
                                   const FeasibleSet& set,
                                   const Eigen::MatrixXd& n_basis) {
  SviProblem problem;
  problem.space = ScenarioSpace::deterministic(static_cast<int>(q.size()));
  problem.maps.push_back(ScenarioMap::affine_map(m, q));
  problem.sets.push_back(set);
  problem.custom_iso_n_basis = n_basis;
  problem.validate();
  return problem;
}

}  // namespace

std::vector<TextbookExample> textbook_examples() {
  std::vector<TextbookExample> out;
  const double root_half = 1.0 / std::sqrt(2.0);

  {
    // F(x1,x2) = (x1, -x2) with first coordinate nonanticipative.
    TextbookExample ex;
    ex.name = "saddle-2d";
    Eigen::MatrixXd basis(2, 1);
    basis << 1.0, 0.0;
    ex.problem = single_scenario_problem(
        (Eigen::MatrixXd(2, 2) << 1, 0, 0, -1).finished(),
        Eigen::VectorXd::Zero(2),
        FeasibleSet::box(Eigen::Vector2d(2.0, 2.0),
                         Eigen::Vector2d(kInf, kInf)),
        basis);
    ex.expected_criterion = Criterion::Coupling;
    ex.expected_bound = 1.0;
    out.push_back(std::move(ex));
  }
  {
    // F(x1,x2) = (0, -x2): the negative curvature sits entirely inside the
    // multiplier image.
    TextbookExample ex;
    ex.name = "flat-negative-2d";
    Eigen::MatrixXd basis(2, 1);
    basis << 1.0, 0.0;
    ex.problem = single_scenario_problem(
        (Eigen::MatrixXd(2, 2) << 0, 0, 0, -1).finished(),
        Eigen::VectorXd::Zero(2),
        FeasibleSet::box(Eigen::Vector2d(1.0, 1.0),
                         Eigen::Vector2d(kInf, kInf)),
        basis);
    ex.expected_criterion = Criterion::CommutingSpectrum;
    ex.expected_bound = 1.0;
    out.push_back(std::move(ex));
  }
  {
    // F(x1,x2,x3) = (-x1, 0, 0) with the first coordinate in the multiplier
    // image; adding the projector at level 1 flattens the spectrum to zero.
    TextbookExample ex;
    ex.name = "drift-3d";
    Eigen::MatrixXd basis(3, 2);
    basis << 0, 0, 1, 0, 0, 1;
    ex.problem = single_scenario_problem(
        (Eigen::MatrixXd(3, 3) << -1, 0, 0, 0, 0, 0, 0, 0, 0).finished(),
        Eigen::VectorXd::Zero(3),
        FeasibleSet::box(Eigen::Vector3d(1.0, 1.0, 1.0),
                         Eigen::Vector3d(kInf, kInf, kInf)),
        basis);
    ex.expected_criterion = Criterion::EigenvalueMultiplicity;
    ex.expected_bound = 1.0;
    ex.level_parameter = 1.0;
    ex.expected_multiplicity = 3;
    out.push_back(std::move(ex));
  }
  {
    // A non-diagonal pair that still commutes: the projector mixes the two
    // middle coordinates and the matrix treats them symmetrically.
    TextbookExample ex;
    ex.name = "commuting-pair-4d";
    Eigen::MatrixXd basis(4, 1);
    basis << 0.0, root_half, -root_half, 0.0;
    ex.problem = single_scenario_problem(
        (Eigen::MatrixXd(4, 4) << 10, 0, 0, 1,
                                   0, 4, 1, 0,
                                   0, 1, 4, 0,
                                   1, 0, 0, 5).finished(),
        Eigen::VectorXd::Zero(4), FeasibleSet::orthant(4), basis);
    ex.expected_criterion = Criterion::CommutingSpectrum;
    ex.expected_bound = 0.0;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace svipha
