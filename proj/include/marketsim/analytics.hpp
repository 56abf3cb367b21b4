#pragma once

#include <optional>
#include <vector>

#include "marketsim/types.hpp"

namespace marketsim {

/// Spinning reserve of one generator in one period, ignoring ramp limits:
/// the full headroom to rated power, or zero when the unit is offline
/// (output at or below eps).
double reserve_type1(double p_sg, const SgParams& params, double eps = 1e-4);

/// Spinning reserve deliverable within one period: headroom capped by the
/// ramp-up rate, zero when offline.
double reserve_type2(double p_sg, const SgParams& params, double eps = 1e-4);

struct ReserveSeries {
  // [company][period]
  std::vector<std::vector<double>> type1;
  std::vector<std::vector<double>> type2;
  // per-period system totals
  std::vector<double> system_type1;
  std::vector<double> system_type2;
  // horizon averages of the system totals (all periods, offline zeros included)
  double avg_type1 = 0.0;
  double avg_type2 = 0.0;
};

ReserveSeries compute_reserves(const Scenario& s, const DispatchResult& d, double eps);

struct LernerResult {
  std::vector<double> series;  // (k_t - 1) / k_t per period
  double mean = 0.0;
};

/// Markup index of the strategic bids; independent of the cost level.
LernerResult lerner_index(const BidVector& bids);

/// Economic and reserve indicators of one cleared case. Money fields are in
/// yen; serialization converts to k-yen.
struct MarketReport {
  double energy_fee = 0.0;              // sum_t price * demand * period_hours
  std::vector<double> company_profit;   // per company, true-cost accounting
  LernerResult lerner;                  // zeros for the non-strategic case
  ReserveSeries reserve;
  std::vector<double> prices;
};

/// Builds the report for a cleared dispatch. Company profit uses each
/// company's true costs (never the bid); wind revenue is added only when
/// s.reporting.include_wind_revenue is set. Throws on dimension mismatch
/// between scenario and dispatch.
MarketReport economic_report(const Scenario& s, const DispatchResult& d,
                             const std::optional<BidVector>& bids = std::nullopt);

}  // namespace marketsim
