#pragma once

#include "marketsim/clearing.hpp"
#include "marketsim/types.hpp"

namespace marketsim {

struct SolveStats {
  long long evaluations = 0;  // inner clearing solves
  int restarts = 0;
  double wall_seconds = 0.0;
};

struct BilevelSolution {
  BidVector bids;
  DispatchResult dispatch;
  double strategic_profit = 0.0;
  SolveStats stats;
};

/// Profit of the strategic company under a clearing outcome: market revenue
/// of its generator at the clearing price minus its true generation cost and
/// its true quadratic battery cost. The bid multiplier never enters: costs
/// are evaluated at the true marginal cost.
double strategic_profit(const DispatchResult& d, const Scenario& s);

/// Maximizes the strategic company's profit over per-period bid multipliers
/// in [1, k_max], clearing the market exactly for every candidate. Multi-start
/// compass search: the all-ones and all-k_max points are always among the
/// starts, so the result is never worse than truthful bidding. Deterministic
/// for a fixed seed. Ties in profit resolve toward the smaller sum of
/// multipliers.
BilevelSolution solve_bilevel(const Scenario& s, const SearchConfig& cfg);
BilevelSolution solve_bilevel(const Scenario& s);  // uses s.solver

/// Exhaustive reference search on the grid {1, 1+step, ...} ∪ {k_max} per
/// period. Refuses grids beyond one million clearing evaluations; intended
/// for short horizons.
BilevelSolution brute_force_bilevel(const Scenario& s, double grid_step);

}  // namespace marketsim
