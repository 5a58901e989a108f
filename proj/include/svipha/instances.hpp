#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "svipha/elicitation.hpp"
#include "svipha/svi_model.hpp"

namespace svipha {

struct GeneratorParams {
  int n1 = 1;
  int n2 = 1;
  int num_scenarios = 1;
  std::uint64_t seed = 0;
};

/// The scalars and vectors drawn for the structured first scenario; exposed
/// so tests can check the sign constraints that make the map pseudomonotone.
struct Scenario1Draw {
  Eigen::VectorXd a, b;
  double a0 = 0.0, b0 = 0.0, alpha = 0.0, beta = 0.0;
};

/// Random pseudomonotone SLCP. Scenario 1 is the structured rank-2 map
/// M = a b^T + b a^T with a >= 0 >= b (resampled until the pair is safely
/// non-parallel) and offset q = b0 a + a0 b + alpha a + beta b with
/// alpha < -b0 and beta > -a0. Scenarios 2..J are random PSD sums of
/// ceil(3n/4) scaled outer products with uniform offsets. Probabilities are
/// uniform draws normalized to sum 1. Fully determined by (params, seed).
TwoStageSlcp gen_pseudo_slcp(const GeneratorParams& params,
                             Scenario1Draw* draw = nullptr);

/// Monotone variant used as an oracle-friendly baseline: every scenario uses
/// the PSD construction plus a ridge, so the aggregated system is strongly
/// monotone and has a unique solution.
TwoStageSlcp gen_monotone_slcp(const GeneratorParams& params,
                               double ridge = 0.1);

/// Two-stage market equilibrium with one first-stage supply quantity and
/// per-scenario second-stage quantities plus a budget multiplier, stated as
/// the complementarity system of its optimality conditions. Ships with the
/// published solution for regression checks.
struct OrangeMarket {
  TwoStageSlcp slcp;
  std::vector<Eigen::Matrix2d> demand_m;  // price sensitivity per scenario
  std::vector<Eigen::Vector2d> demand_q;  // price intercepts per scenario

  double supply_quantity = 0.0;                 // reference Q_S
  std::vector<Eigen::Vector2d> quantities;      // (Q_J, Q_F) per scenario
  std::vector<double> multipliers;              // stationarity multipliers
  std::vector<Eigen::Vector2d> prices;          // published (P_J, P_F)

  Eigen::Vector2d price(int scenario, const Eigen::Vector2d& q) const {
    return demand_m[scenario] * q + demand_q[scenario];
  }
};

OrangeMarket orange_market();

/// Small single-scenario problems with explicitly-specified subspace splits
/// and known elicitation outcomes; used to validate the checkers.
struct TextbookExample {
  std::string name;
  SviProblem problem;
  Criterion expected_criterion;
  double expected_bound = 0.0;
  double level_parameter = 0.0;  // input level for the multiplicity check
  int expected_multiplicity = 0;
};

std::vector<TextbookExample> textbook_examples();

}  // namespace svipha
