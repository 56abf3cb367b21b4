#include "marketsim/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace marketsim {

namespace {

using nlohmann::json;

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string dispatch_csv(const Scenario& s, const DispatchResult& d, const ReserveSeries& r) {
  std::ostringstream os;
  os << "period,lambda";
  for (const auto& co : s.companies)
    os << ',' << co.id << "_sg," << co.id << "_bs," << co.id << "_wt," << co.id << "_soc,"
       << co.id << "_type1," << co.id << "_type2";
  os << '\n';
  for (int t = 0; t < s.horizon; ++t) {
    os << t + 1 << ',' << num(d.prices[t]);
    for (std::size_t c = 0; c < s.companies.size(); ++c) {
      const auto& cd = d.companies[c];
      os << ',' << num(cd.sg_output[t]) << ',' << num(cd.bs_power[t]) << ',' << num(cd.wt_output[t])
         << ',' << num(cd.soc[t]) << ',' << num(r.type1[c][t]) << ',' << num(r.type2[c][t]);
    }
    os << '\n';
  }
  return os.str();
}

std::string summary_json(const std::string& case_name, const Scenario& s, const MarketReport& rep,
                         const BilevelSolution* bilevel) {
  json j;
  j["case"] = case_name;
  j["energy_fee_kyen"] = rep.energy_fee / 1000.0;
  json profits = json::object();
  for (std::size_t c = 0; c < s.companies.size(); ++c)
    profits[s.companies[c].id] = rep.company_profit[c] / 1000.0;
  j["profit_kyen"] = profits;
  j["lerner_mean"] = rep.lerner.mean;
  j["lerner"] = rep.lerner.series;
  j["avg_reserve_type1_mw"] = rep.reserve.avg_type1;
  j["avg_reserve_type2_mw"] = rep.reserve.avg_type2;
  j["prices"] = rep.prices;
  if (bilevel) {
    j["bids"] = bilevel->bids.k;
    j["strategic_profit_kyen"] = bilevel->strategic_profit / 1000.0;
    j["search"] = {{"evaluations", bilevel->stats.evaluations},
                   {"restarts", bilevel->stats.restarts},
                   {"wall_seconds", bilevel->stats.wall_seconds}};
  }
  return j.dump(2) + "\n";
}

std::string svg_line_chart(const std::string& title, const std::string& y_label,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const double width = 860, height = 480;
  const double ml = 70, mr = 160, mt = 46, mb = 48;
  const double pw = width - ml - mr, ph = height - mt - mb;

  std::size_t T = 0;
  double ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const auto& [name, vals] : series) {
    T = std::max(T, vals.size());
    for (double v : vals) {
      if (first) {
        ymin = ymax = v;
        first = false;
      }
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (T == 0) T = 1;
  ymin = std::min(ymin, 0.0);
  if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymax += pad;

  auto xpos = [&](std::size_t t) {
    return T > 1 ? ml + pw * static_cast<double>(t) / static_cast<double>(T - 1) : ml + pw / 2;
  };
  auto ypos = [&](double v) { return mt + ph * (1.0 - (v - ymin) / (ymax - ymin)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << title
     << "</text>\n";

  // horizontal gridlines with tick labels
  for (int g = 0; g <= 5; ++g) {
    const double v = ymin + (ymax - ymin) * g / 5.0;
    const double y = ypos(v);
    os << "<line x1=\"" << ml << "\" y1=\"" << num(y) << "\" x2=\"" << ml + pw << "\" y2=\""
       << num(y) << "\" stroke=\"#dddddd\"/>\n"
       << "<text x=\"" << ml - 8 << "\" y=\"" << num(y + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << num(v)
       << "</text>\n";
  }
  // x ticks every 4 periods
  for (std::size_t t = 0; t < T; t += 4) {
    os << "<text x=\"" << num(xpos(t)) << "\" y=\"" << height - mb + 18
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << t + 1
       << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">period</text>\n"
     << "<text x=\"18\" y=\"" << mt + ph / 2
     << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << mt + ph / 2 << ")\">" << y_label << "</text>\n"
     << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444444\"/>\n";

  int color = 0;
  for (const auto& [name, vals] : series) {
    const char* stroke = kPalette[color % 8];
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t t = 0; t < vals.size(); ++t) {
      if (t) os << ' ';
      os << num(xpos(t)) << ',' << num(ypos(vals[t]));
    }
    os << "\"/>\n";
    const double ly = mt + 16 + 18 * color;
    os << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << ml + pw + 34
       << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << stroke << "\" stroke-width=\"1.8\"/>\n"
       << "<text x=\"" << ml + pw + 40 << "\" y=\"" << num(ly)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << name << "</text>\n";
    ++color;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace marketsim
