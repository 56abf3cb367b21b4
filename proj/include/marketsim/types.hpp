#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace marketsim {

/// Synchronous generator parameters. Powers in MW, ramps in MW per period,
/// marginal cost in yen/MWh.
struct SgParams {
  double p_max = 0.0;
  double ramp_up = 0.0;
  double ramp_down = 0.0;
  double p_initial = 0.0;
  double marginal_cost = 0.0;

  bool operator==(const SgParams&) const = default;
};

/// Battery storage parameters. State of charge is a fraction of e_max.
/// levelized_cost is the quadratic cost coefficient in yen/MW^2*h: the
/// operating cost of a battery running at power p for one period is
/// levelized_cost * p^2, which keeps charging and discharging equally
/// penalized.
struct BsParams {
  double p_max = 0.0;   // MW, symmetric charge/discharge limit
  double e_max = 0.0;   // MWh
  double soc_initial = 0.0;
  double soc_min = 0.0;
  double soc_max = 1.0;
  double levelized_cost = 0.0;

  bool operator==(const BsParams&) const = default;
};

/// One power company: a generator, a battery, and a wind availability profile
/// (rated wind power per period, MW).
struct CompanyAssets {
  std::string id;
  SgParams sg;
  BsParams bs;
  std::vector<double> wind_profile;

  bool operator==(const CompanyAssets&) const = default;
};

/// Outer-search configuration for the strategic bidding solver.
struct SearchConfig {
  int restarts = 8;
  std::uint64_t seed = 42;
  int max_evals = 5000;     // budget of inner clearing solves
  double grid_step = 0.01;  // step for the exhaustive oracle
  bool operator==(const SearchConfig&) const = default;
};

/// Report tuning. eps_online is the output threshold (MW) below which a
/// generator counts as offline for reserve purposes; interior-point solutions
/// never return exact zeros.
struct ReportingConfig {
  double eps_online = 1e-4;
  bool include_wind_revenue = false;
  bool operator==(const ReportingConfig&) const = default;
};

/// A full market instance. Immutable after construction; share freely.
struct Scenario {
  int horizon = 0;             // number of periods T
  double period_hours = 1.0;   // duration of one period
  std::vector<CompanyAssets> companies;
  std::vector<double> demand;  // MW, length T
  std::optional<std::string> strategic_company;
  double k_max = 2.0;          // bid multiplier upper bound
  SearchConfig solver;
  ReportingConfig reporting;

  bool operator==(const Scenario&) const = default;

  /// Index of the company with the given id, if any.
  std::optional<int> company_index(const std::string& id) const;

  /// Index of the strategic company; nullopt when the market is non-strategic.
  std::optional<int> strategic_index() const;
};

/// Per-period bid multipliers for the strategic company's generator offer.
/// Valid entries lie in [1, k_max].
struct BidVector {
  std::vector<double> k;
  bool operator==(const BidVector&) const = default;
};

/// Market clearing outcome: dispatch trajectories per company, uniform
/// clearing prices, and the cleared objective value.
struct DispatchResult {
  struct CompanyDispatch {
    std::vector<double> sg_output;  // MW
    std::vector<double> bs_power;   // MW, positive = discharge
    std::vector<double> wt_output;  // MW
    std::vector<double> soc;        // fraction of e_max
    bool operator==(const CompanyDispatch&) const = default;
  };

  std::vector<CompanyDispatch> companies;
  std::vector<double> prices;  // yen/MWh, one per period
  double objective_value = 0.0;

  bool operator==(const DispatchResult&) const = default;
};

}  // namespace marketsim
