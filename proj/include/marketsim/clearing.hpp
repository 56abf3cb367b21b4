#pragma once

#include <optional>

#include "marketsim/qp.hpp"
#include "marketsim/types.hpp"

namespace marketsim {

/// Maps (company, period) pairs to flat QP variable and equality-row indices.
/// Variable layout per company: generator output, battery power, wind output,
/// state of charge, each a block of T entries. Equality rows: the T balance
/// rows first (their duals are the clearing prices), then the per-company
/// state-of-charge recursions, then one cyclic state-of-charge row per
/// company.
struct ClearingIndex {
  int horizon = 0;
  int n_companies = 0;

  int n_vars() const { return 4 * horizon * n_companies; }
  int sg(int c, int t) const { return (4 * c + 0) * horizon + t; }
  int bs(int c, int t) const { return (4 * c + 1) * horizon + t; }
  int wt(int c, int t) const { return (4 * c + 2) * horizon + t; }
  int soc(int c, int t) const { return (4 * c + 3) * horizon + t; }

  int n_eq() const { return horizon + n_companies * horizon + n_companies; }
  int balance_row(int t) const { return t; }
  int soc_row(int c, int t) const { return horizon + c * horizon + t; }
  int cyclic_row(int c) const { return horizon + n_companies * horizon + c; }
};

struct ClearingQp {
  QpProblem qp;
  ClearingIndex index;
};

/// Assembles the cost-minimizing clearing problem. When bids are given the
/// strategic company's generator offer in period t becomes k_t times its true
/// marginal cost; every other coefficient is unchanged. Battery cost stays at
/// the true quadratic coefficient even for the strategic company.
///
/// Preconditions: the scenario validates, and bids are present exactly when
/// strategic_company is set. Throws ValidationError on bid length or range
/// violations.
ClearingQp build_clearing_qp(const Scenario& s, const std::optional<BidVector>& bids);

/// Clears the market: solves the QP and unpacks dispatch plus per-period
/// prices (duals of the balance rows). Throws SolveError when the scenario is
/// infeasible, naming the first period whose demand exceeds the total supply
/// capability when that is the cause.
DispatchResult clear_market(const Scenario& s, const std::optional<BidVector>& bids = std::nullopt);

/// As above, reusing a caller-owned solver workspace across calls.
DispatchResult clear_market(const Scenario& s, const std::optional<BidVector>& bids,
                            QpSolver& solver);

}  // namespace marketsim
