#include "marketsim/clearing.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "marketsim/errors.hpp"
#include "marketsim/scenario.hpp"

namespace marketsim {

namespace {

using Triplet = Eigen::Triplet<double>;

void check_bids(const Scenario& s, const std::optional<BidVector>& bids) {
  if (bids.has_value() != s.strategic_company.has_value()) {
    throw ValidationError(bids ? "bids given but scenario has no strategic company"
                               : "scenario has a strategic company but no bids were given");
  }
  if (!bids) return;
  if (static_cast<int>(bids->k.size()) != s.horizon) {
    std::ostringstream os;
    os << "bid vector length " << bids->k.size() << " does not match horizon " << s.horizon;
    throw ValidationError(os.str());
  }
  for (std::size_t t = 0; t < bids->k.size(); ++t) {
    const double k = bids->k[t];
    if (!(k >= 1.0 && k <= s.k_max)) {
      std::ostringstream os;
      os << "bid multiplier k[" << t + 1 << "] = " << k << " outside [1, " << s.k_max << "]";
      throw ValidationError(os.str());
    }
  }
}

}  // namespace

ClearingQp build_clearing_qp(const Scenario& s, const std::optional<BidVector>& bids) {
  require_valid(s);
  check_bids(s, bids);

  const int T = s.horizon;
  const int C = static_cast<int>(s.companies.size());
  const double dt = s.period_hours;
  const auto strategic = s.strategic_index();

  ClearingIndex ix;
  ix.horizon = T;
  ix.n_companies = C;
  const int n = ix.n_vars();

  QpProblem qp;
  qp.n = n;
  qp.linear_cost = Eigen::VectorXd::Zero(n);

  std::vector<Triplet> q_trip;
  for (int c = 0; c < C; ++c) {
    const auto& co = s.companies[c];
    const bool is_strategic = strategic && *strategic == c;
    for (int t = 0; t < T; ++t) {
      const double k = is_strategic ? bids->k[t] : 1.0;
      qp.linear_cost[ix.sg(c, t)] = k * co.sg.marginal_cost;
      // objective carries o_bs * p^2, so the 1/2 x'Qx form needs 2*o_bs
      q_trip.emplace_back(ix.bs(c, t), ix.bs(c, t), 2.0 * co.bs.levelized_cost);
    }
  }
  qp.quadratic_cost.resize(n, n);
  qp.quadratic_cost.setFromTriplets(q_trip.begin(), q_trip.end());

  // Equalities: supply-demand balance per period, state-of-charge recursion,
  // and the cyclic end-of-horizon condition.
  std::vector<Triplet> a_trip;
  qp.eq_rhs = Eigen::VectorXd::Zero(ix.n_eq());
  for (int t = 0; t < T; ++t) {
    for (int c = 0; c < C; ++c) {
      a_trip.emplace_back(ix.balance_row(t), ix.sg(c, t), 1.0);
      a_trip.emplace_back(ix.balance_row(t), ix.bs(c, t), 1.0);
      a_trip.emplace_back(ix.balance_row(t), ix.wt(c, t), 1.0);
    }
    qp.eq_rhs[ix.balance_row(t)] = s.demand[t];
  }
  for (int c = 0; c < C; ++c) {
    const auto& bs = s.companies[c].bs;
    for (int t = 0; t < T; ++t) {
      // soc_t - soc_{t-1} + p_bs * dt / e_max = 0, soc_{-1} fixed at soc_initial
      a_trip.emplace_back(ix.soc_row(c, t), ix.soc(c, t), 1.0);
      a_trip.emplace_back(ix.soc_row(c, t), ix.bs(c, t), dt / bs.e_max);
      if (t > 0) {
        a_trip.emplace_back(ix.soc_row(c, t), ix.soc(c, t - 1), -1.0);
      } else {
        qp.eq_rhs[ix.soc_row(c, t)] = bs.soc_initial;
      }
    }
    a_trip.emplace_back(ix.cyclic_row(c), ix.soc(c, T - 1), 1.0);
    qp.eq_rhs[ix.cyclic_row(c)] = bs.soc_initial;
  }
  qp.eq_matrix.resize(ix.n_eq(), n);
  qp.eq_matrix.setFromTriplets(a_trip.begin(), a_trip.end());

  // Box rows for every variable plus generator ramp rows.
  std::vector<Triplet> in_trip;
  std::vector<double> lo, up;
  auto add_bound = [&](int var, double l, double u) {
    in_trip.emplace_back(static_cast<int>(lo.size()), var, 1.0);
    lo.push_back(l);
    up.push_back(u);
  };
  for (int c = 0; c < C; ++c) {
    const auto& co = s.companies[c];
    const double ru = co.sg.ramp_up * dt;
    const double rd = co.sg.ramp_down * dt;
    for (int t = 0; t < T; ++t) {
      if (t == 0) {
        // first-period output is ramp-limited against the pre-horizon output
        add_bound(ix.sg(c, 0), std::max(0.0, co.sg.p_initial - rd),
                  std::min(co.sg.p_max, co.sg.p_initial + ru));
      } else {
        add_bound(ix.sg(c, t), 0.0, co.sg.p_max);
        const int r = static_cast<int>(lo.size());
        in_trip.emplace_back(r, ix.sg(c, t), 1.0);
        in_trip.emplace_back(r, ix.sg(c, t - 1), -1.0);
        lo.push_back(-rd);
        up.push_back(ru);
      }
      add_bound(ix.bs(c, t), -co.bs.p_max, co.bs.p_max);
      add_bound(ix.wt(c, t), 0.0, co.wind_profile[t]);
      add_bound(ix.soc(c, t), co.bs.soc_min, co.bs.soc_max);
    }
  }
  qp.in_matrix.resize(static_cast<int>(lo.size()), n);
  qp.in_matrix.setFromTriplets(in_trip.begin(), in_trip.end());
  qp.in_lower = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  qp.in_upper = Eigen::Map<const Eigen::VectorXd>(up.data(), static_cast<Eigen::Index>(up.size()));

  return {std::move(qp), ix};
}

DispatchResult clear_market(const Scenario& s, const std::optional<BidVector>& bids,
                            QpSolver& solver) {
  // Cheap necessary condition first so capacity shortfalls get a precise error.
  for (int t = 0; t < s.horizon; ++t) {
    double cap = 0.0;
    for (const auto& co : s.companies) {
      cap += co.sg.p_max + co.bs.p_max;
      if (t < static_cast<int>(co.wind_profile.size())) cap += co.wind_profile[t];
    }
    if (t < static_cast<int>(s.demand.size()) && s.demand[t] > cap + 1e-9) {
      std::ostringstream os;
      os << "market infeasible: demand " << s.demand[t] << " MW exceeds total supply capability "
         << cap << " MW at period " << t + 1;
      throw SolveError(os.str(), t + 1);
    }
  }

  ClearingQp built = build_clearing_qp(s, bids);
  const auto& ix = built.index;
  QpSolution qs = solver.solve(built.qp, 1e-10, 300);
  if (qs.status == QpStatus::infeasible) {
    throw SolveError("market infeasible: no dispatch satisfies the balance, ramp and storage constraints");
  }

  const int T = s.horizon;
  const int C = static_cast<int>(s.companies.size());
  DispatchResult d;
  d.objective_value = built.qp.objective(qs.x);
  d.prices.resize(T);
  for (int t = 0; t < T; ++t) d.prices[t] = qs.eq_duals[ix.balance_row(t)];
  d.companies.resize(C);
  for (int c = 0; c < C; ++c) {
    auto& cd = d.companies[c];
    cd.sg_output.resize(T);
    cd.bs_power.resize(T);
    cd.wt_output.resize(T);
    cd.soc.resize(T);
    for (int t = 0; t < T; ++t) {
      cd.sg_output[t] = qs.x[ix.sg(c, t)];
      cd.bs_power[t] = qs.x[ix.bs(c, t)];
      cd.wt_output[t] = qs.x[ix.wt(c, t)];
      cd.soc[t] = qs.x[ix.soc(c, t)];
    }
  }

  // What the dispatch contract actually promises is checked in absolute
  // terms, directly on the unpacked solution: balance within 1e-6 MW, state
  // of charge recursion and the cyclic condition within 1e-8, box and ramp
  // constraints within 1e-6. A solve that stalled shy of the headline
  // tolerance is still accepted when it meets these bars (with margin) and
  // its stationarity defect stays far below price-reporting precision.
  double balance_res = 0.0, soc_res = 0.0, box_viol = 0.0;
  for (int t = 0; t < T; ++t) {
    double supply = 0.0;
    for (int c = 0; c < C; ++c)
      supply += d.companies[c].sg_output[t] + d.companies[c].bs_power[t] + d.companies[c].wt_output[t];
    balance_res = std::max(balance_res, std::abs(supply - s.demand[t]));
  }
  for (int c = 0; c < C; ++c) {
    const auto& co = s.companies[c];
    const auto& cd = d.companies[c];
    double prev_soc = co.bs.soc_initial;
    double prev_sg = co.sg.p_initial;
    for (int t = 0; t < T; ++t) {
      soc_res = std::max(
          soc_res, std::abs(cd.soc[t] - prev_soc + cd.bs_power[t] * s.period_hours / co.bs.e_max));
      prev_soc = cd.soc[t];
      const double dsg = cd.sg_output[t] - prev_sg;
      box_viol = std::max({box_viol, dsg - co.sg.ramp_up * s.period_hours,
                           -co.sg.ramp_down * s.period_hours - dsg});
      prev_sg = cd.sg_output[t];
      box_viol = std::max({box_viol, -cd.sg_output[t], cd.sg_output[t] - co.sg.p_max,
                           std::abs(cd.bs_power[t]) - co.bs.p_max, -cd.wt_output[t],
                           cd.wt_output[t] - co.wind_profile[t], co.bs.soc_min - cd.soc[t],
                           cd.soc[t] - co.bs.soc_max});
    }
    soc_res = std::max(soc_res, std::abs(cd.soc[T - 1] - co.bs.soc_initial));
  }

  const bool feasible_enough = balance_res <= 5e-7 && soc_res <= 5e-9 && box_viol <= 5e-7;
  const bool duals_enough =
      qs.status == QpStatus::optimal || (qs.kkt.dual <= 1e-6 && qs.kkt.comp <= 1e-8);
  if (!feasible_enough || !duals_enough)
    throw SolveError("market clearing did not converge to the requested tolerance");
  return d;
}

DispatchResult clear_market(const Scenario& s, const std::optional<BidVector>& bids) {
  QpSolver solver;
  return clear_market(s, bids, solver);
}

}  // namespace marketsim
