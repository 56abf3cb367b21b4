#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "marketsim/analytics.hpp"
#include "marketsim/bilevel.hpp"
#include "marketsim/clearing.hpp"
#include "marketsim/errors.hpp"
#include "marketsim/runner.hpp"
#include "marketsim/scenario.hpp"

namespace py = pybind11;
using namespace marketsim;

PYBIND11_MODULE(_marketsim, m) {
  m.doc() = "Electricity market clearing and strategic bidding simulator";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<SgParams>(m, "SgParams")
      .def(py::init<>())
      .def_readwrite("p_max", &SgParams::p_max)
      .def_readwrite("ramp_up", &SgParams::ramp_up)
      .def_readwrite("ramp_down", &SgParams::ramp_down)
      .def_readwrite("p_initial", &SgParams::p_initial)
      .def_readwrite("marginal_cost", &SgParams::marginal_cost);

  py::class_<BsParams>(m, "BsParams")
      .def(py::init<>())
      .def_readwrite("p_max", &BsParams::p_max)
      .def_readwrite("e_max", &BsParams::e_max)
      .def_readwrite("soc_initial", &BsParams::soc_initial)
      .def_readwrite("soc_min", &BsParams::soc_min)
      .def_readwrite("soc_max", &BsParams::soc_max)
      .def_readwrite("levelized_cost", &BsParams::levelized_cost);

  py::class_<CompanyAssets>(m, "CompanyAssets")
      .def(py::init<>())
      .def_readwrite("id", &CompanyAssets::id)
      .def_readwrite("sg", &CompanyAssets::sg)
      .def_readwrite("bs", &CompanyAssets::bs)
      .def_readwrite("wind_profile", &CompanyAssets::wind_profile);

  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("restarts", &SearchConfig::restarts)
      .def_readwrite("seed", &SearchConfig::seed)
      .def_readwrite("max_evals", &SearchConfig::max_evals)
      .def_readwrite("grid_step", &SearchConfig::grid_step);

  py::class_<ReportingConfig>(m, "ReportingConfig")
      .def(py::init<>())
      .def_readwrite("eps_online", &ReportingConfig::eps_online)
      .def_readwrite("include_wind_revenue", &ReportingConfig::include_wind_revenue);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("period_hours", &Scenario::period_hours)
      .def_readwrite("companies", &Scenario::companies)
      .def_readwrite("demand", &Scenario::demand)
      .def_readwrite("strategic_company", &Scenario::strategic_company)
      .def_readwrite("k_max", &Scenario::k_max)
      .def_readwrite("solver", &Scenario::solver)
      .def_readwrite("reporting", &Scenario::reporting);

  py::class_<BidVector>(m, "BidVector")
      .def(py::init<>())
      .def(py::init([](std::vector<double> k) { return BidVector{std::move(k)}; }))
      .def_readwrite("k", &BidVector::k);

  py::class_<DispatchResult::CompanyDispatch>(m, "CompanyDispatch")
      .def_readonly("sg_output", &DispatchResult::CompanyDispatch::sg_output)
      .def_readonly("bs_power", &DispatchResult::CompanyDispatch::bs_power)
      .def_readonly("wt_output", &DispatchResult::CompanyDispatch::wt_output)
      .def_readonly("soc", &DispatchResult::CompanyDispatch::soc);

  py::class_<DispatchResult>(m, "DispatchResult")
      .def_readonly("companies", &DispatchResult::companies)
      .def_readonly("prices", &DispatchResult::prices)
      .def_readonly("objective_value", &DispatchResult::objective_value);

  py::class_<ReserveSeries>(m, "ReserveSeries")
      .def_readonly("type1", &ReserveSeries::type1)
      .def_readonly("type2", &ReserveSeries::type2)
      .def_readonly("system_type1", &ReserveSeries::system_type1)
      .def_readonly("system_type2", &ReserveSeries::system_type2)
      .def_readonly("avg_type1", &ReserveSeries::avg_type1)
      .def_readonly("avg_type2", &ReserveSeries::avg_type2);

  py::class_<LernerResult>(m, "LernerResult")
      .def_readonly("series", &LernerResult::series)
      .def_readonly("mean", &LernerResult::mean);

  py::class_<MarketReport>(m, "MarketReport")
      .def_readonly("energy_fee", &MarketReport::energy_fee)
      .def_readonly("company_profit", &MarketReport::company_profit)
      .def_readonly("lerner", &MarketReport::lerner)
      .def_readonly("reserve", &MarketReport::reserve)
      .def_readonly("prices", &MarketReport::prices);

  py::class_<SolveStats>(m, "SolveStats")
      .def_readonly("evaluations", &SolveStats::evaluations)
      .def_readonly("restarts", &SolveStats::restarts)
      .def_readonly("wall_seconds", &SolveStats::wall_seconds);

  py::class_<BilevelSolution>(m, "BilevelSolution")
      .def_readonly("bids", &BilevelSolution::bids)
      .def_readonly("dispatch", &BilevelSolution::dispatch)
      .def_readonly("strategic_profit", &BilevelSolution::strategic_profit)
      .def_readonly("stats", &BilevelSolution::stats);

  py::class_<CaseResult>(m, "CaseResult")
      .def_readonly("name", &CaseResult::name)
      .def_readonly("dispatch", &CaseResult::dispatch)
      .def_readonly("report", &CaseResult::report)
      .def_readonly("bilevel", &CaseResult::bilevel);

  py::class_<RunManifest>(m, "RunManifest")
      .def(py::init<>())
      .def_readwrite("scenario_path", &RunManifest::scenario_path)
      .def_readwrite("cases", &RunManifest::cases)
      .def_readwrite("out_dir", &RunManifest::out_dir)
      .def_readwrite("solver_override", &RunManifest::solver_override);

  py::class_<SuiteResult>(m, "SuiteResult")
      .def_readonly("cases", &SuiteResult::cases)
      .def_readonly("out_dir", &SuiteResult::out_dir);

  m.def("validate_scenario", &validate_scenario, py::arg("scenario"));
  m.def("table1_scenario", &table1_scenario);
  m.def("scenario_to_json", &scenario_to_json, py::arg("scenario"), py::arg("indent") = 2);
  m.def("scenario_from_json", &scenario_from_json, py::arg("text"));
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("save_scenario", &save_scenario, py::arg("scenario"), py::arg("path"));

  m.def(
      "clear_market",
      [](const Scenario& s, const std::optional<BidVector>& bids) { return clear_market(s, bids); },
      py::arg("scenario"), py::arg("bids") = std::nullopt,
      "Clear the market; bids apply to the strategic company's generator offer");
  m.def("strategic_profit", &strategic_profit, py::arg("dispatch"), py::arg("scenario"));
  m.def(
      "solve_bilevel",
      [](const Scenario& s, const std::optional<SearchConfig>& cfg) {
        return cfg ? solve_bilevel(s, *cfg) : solve_bilevel(s);
      },
      py::arg("scenario"), py::arg("config") = std::nullopt);
  m.def("brute_force_bilevel", &brute_force_bilevel, py::arg("scenario"), py::arg("grid_step"));

  m.def(
      "reserve_type1",
      [](double p, const SgParams& g, double eps) { return reserve_type1(p, g, eps); },
      py::arg("p_sg"), py::arg("params"), py::arg("eps") = 1e-4);
  m.def(
      "reserve_type2",
      [](double p, const SgParams& g, double eps) { return reserve_type2(p, g, eps); },
      py::arg("p_sg"), py::arg("params"), py::arg("eps") = 1e-4);
  m.def("lerner_index", &lerner_index, py::arg("bids"));
  m.def(
      "economic_report",
      [](const Scenario& s, const DispatchResult& d, const std::optional<BidVector>& bids) {
        return economic_report(s, d, bids);
      },
      py::arg("scenario"), py::arg("dispatch"), py::arg("bids") = std::nullopt);

  m.def("run_pcm", &run_pcm, py::arg("scenario"));
  m.def("run_icm", &run_icm, py::arg("scenario"), py::arg("strategic"));
  m.def("run_case", &run_case, py::arg("scenario"), py::arg("case_name"));
  m.def("run_suite", &run_suite, py::arg("manifest"));
  m.def("load_manifest", &load_manifest, py::arg("path"));
}
