#include "marketsim/analytics.hpp"

#include <algorithm>
#include <sstream>

#include "marketsim/errors.hpp"

namespace marketsim {

double reserve_type1(double p_sg, const SgParams& params, double eps) {
  if (p_sg <= eps) return 0.0;
  return std::max(params.p_max - p_sg, 0.0);
}

double reserve_type2(double p_sg, const SgParams& params, double eps) {
  if (p_sg <= eps) return 0.0;
  return std::min(std::max(params.p_max - p_sg, 0.0), params.ramp_up);
}

ReserveSeries compute_reserves(const Scenario& s, const DispatchResult& d, double eps) {
  const int T = s.horizon;
  const int C = static_cast<int>(s.companies.size());
  ReserveSeries r;
  r.type1.assign(C, std::vector<double>(T, 0.0));
  r.type2.assign(C, std::vector<double>(T, 0.0));
  r.system_type1.assign(T, 0.0);
  r.system_type2.assign(T, 0.0);
  for (int c = 0; c < C; ++c) {
    for (int t = 0; t < T; ++t) {
      const double p = d.companies[c].sg_output[t];
      r.type1[c][t] = reserve_type1(p, s.companies[c].sg, eps);
      r.type2[c][t] = reserve_type2(p, s.companies[c].sg, eps);
      r.system_type1[t] += r.type1[c][t];
      r.system_type2[t] += r.type2[c][t];
    }
  }
  for (int t = 0; t < T; ++t) {
    r.avg_type1 += r.system_type1[t] / T;
    r.avg_type2 += r.system_type2[t] / T;
  }
  return r;
}

LernerResult lerner_index(const BidVector& bids) {
  LernerResult out;
  out.series.reserve(bids.k.size());
  for (double k : bids.k) {
    out.series.push_back((k - 1.0) / k);
    out.mean += out.series.back();
  }
  if (!bids.k.empty()) out.mean /= static_cast<double>(bids.k.size());
  return out;
}

MarketReport economic_report(const Scenario& s, const DispatchResult& d,
                             const std::optional<BidVector>& bids) {
  const int T = s.horizon;
  const int C = static_cast<int>(s.companies.size());
  if (static_cast<int>(d.companies.size()) != C || static_cast<int>(d.prices.size()) != T)
    throw ValidationError("economic_report: dispatch does not match the scenario dimensions");
  for (const auto& cd : d.companies) {
    if (static_cast<int>(cd.sg_output.size()) != T || static_cast<int>(cd.bs_power.size()) != T ||
        static_cast<int>(cd.wt_output.size()) != T || static_cast<int>(cd.soc.size()) != T)
      throw ValidationError("economic_report: dispatch series length does not match the horizon");
  }
  if (bids && static_cast<int>(bids->k.size()) != T)
    throw ValidationError("economic_report: bid vector length does not match the horizon");

  MarketReport rep;
  rep.prices = d.prices;
  for (int t = 0; t < T; ++t) rep.energy_fee += d.prices[t] * s.demand[t] * s.period_hours;

  rep.company_profit.assign(C, 0.0);
  for (int c = 0; c < C; ++c) {
    const auto& co = s.companies[c];
    const auto& cd = d.companies[c];
    for (int t = 0; t < T; ++t) {
      const double sg = cd.sg_output[t];
      const double bs = cd.bs_power[t];
      rep.company_profit[c] +=
          d.prices[t] * sg - co.sg.marginal_cost * sg - co.bs.levelized_cost * bs * bs;
      if (s.reporting.include_wind_revenue) rep.company_profit[c] += d.prices[t] * cd.wt_output[t];
    }
  }

  if (bids) {
    rep.lerner = lerner_index(*bids);
  } else {
    rep.lerner.series.assign(T, 0.0);
    rep.lerner.mean = 0.0;
  }
  rep.reserve = compute_reserves(s, d, s.reporting.eps_online);
  return rep;
}

}  // namespace marketsim
