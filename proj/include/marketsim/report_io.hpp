#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marketsim/analytics.hpp"
#include "marketsim/bilevel.hpp"
#include "marketsim/types.hpp"

namespace marketsim {

/// Per-period dispatch table: period index, clearing price, then generator
/// output, battery power, wind output, state of charge and both reserve
/// types for every company. Deterministic formatting: identical inputs give
/// identical bytes.
std::string dispatch_csv(const Scenario& s, const DispatchResult& d, const ReserveSeries& r);

/// Case summary as a JSON document. Money is reported in k-yen. For
/// strategic cases the bid vector and search statistics are included.
std::string summary_json(const std::string& case_name, const Scenario& s, const MarketReport& rep,
                         const BilevelSolution* bilevel);

/// One line chart with one polyline per named series, rendered as a static
/// SVG. x runs over periods 1..T.
std::string svg_line_chart(const std::string& title, const std::string& y_label,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series);

}  // namespace marketsim
