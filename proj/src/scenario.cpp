#include "marketsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "marketsim/errors.hpp"

namespace marketsim {

using nlohmann::json;

std::optional<int> Scenario::company_index(const std::string& id) const {
  for (std::size_t i = 0; i < companies.size(); ++i) {
    if (companies[i].id == id) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> Scenario::strategic_index() const {
  if (!strategic_company) return std::nullopt;
  return company_index(*strategic_company);
}

namespace {

bool finite(double v) { return std::isfinite(v); }

void check_sg(const SgParams& g, const std::string& who, std::vector<std::string>& errs) {
  auto bad = [&](const std::string& msg) { errs.push_back(who + ": " + msg); };
  if (!finite(g.p_max) || g.p_max <= 0) bad("sg.p_max must be > 0");
  if (!finite(g.ramp_up) || g.ramp_up <= 0) bad("sg.ramp_up must be > 0");
  if (!finite(g.ramp_down) || g.ramp_down <= 0) bad("sg.ramp_down must be > 0");
  if (!finite(g.p_initial) || g.p_initial < 0 || g.p_initial > g.p_max)
    bad("sg.p_initial must lie in [0, p_max]");
  if (!finite(g.marginal_cost) || g.marginal_cost < 0) bad("sg.marginal_cost must be >= 0");
}

void check_bs(const BsParams& b, const std::string& who, std::vector<std::string>& errs) {
  auto bad = [&](const std::string& msg) { errs.push_back(who + ": " + msg); };
  if (!finite(b.p_max) || b.p_max <= 0) bad("bs.p_max must be > 0");
  if (!finite(b.e_max) || b.e_max <= 0) bad("bs.e_max must be > 0");
  if (!finite(b.soc_min) || !finite(b.soc_initial) || !finite(b.soc_max) || b.soc_min < 0 ||
      b.soc_min > b.soc_initial || b.soc_initial > b.soc_max || b.soc_max > 1.0)
    bad("bs state of charge must satisfy 0 <= soc_min <= soc_initial <= soc_max <= 1");
  if (!finite(b.levelized_cost) || b.levelized_cost < 0) bad("bs.levelized_cost must be >= 0");
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> errs;
  if (s.horizon < 1) errs.push_back("horizon must be >= 1");
  if (!finite(s.period_hours) || s.period_hours <= 0) errs.push_back("period_hours must be > 0");
  if (!finite(s.k_max) || s.k_max < 1.0) errs.push_back("k_max below 1");

  const auto T = static_cast<std::size_t>(std::max(s.horizon, 0));
  if (s.demand.size() != T) {
    std::ostringstream os;
    os << "demand length " << s.demand.size() << " does not match horizon " << s.horizon;
    errs.push_back(os.str());
  }
  for (std::size_t t = 0; t < s.demand.size(); ++t) {
    if (!finite(s.demand[t]) || s.demand[t] < 0) {
      std::ostringstream os;
      os << "demand must be >= 0 (period " << t + 1 << ")";
      errs.push_back(os.str());
      break;
    }
  }

  if (s.companies.empty()) errs.push_back("scenario needs at least one company");
  std::set<std::string> ids;
  for (const auto& co : s.companies) {
    const std::string who = "company " + co.id;
    if (co.id.empty()) errs.push_back("company id must be non-empty");
    if (!ids.insert(co.id).second) errs.push_back("duplicate company id " + co.id);
    check_sg(co.sg, who, errs);
    check_bs(co.bs, who, errs);
    if (co.wind_profile.size() != T) {
      std::ostringstream os;
      os << who << ": wind_profile length " << co.wind_profile.size()
         << " does not match horizon " << s.horizon;
      errs.push_back(os.str());
    }
    for (double w : co.wind_profile) {
      if (!finite(w) || w < 0) {
        errs.push_back(who + ": wind_profile entries must be >= 0");
        break;
      }
    }
  }

  if (s.strategic_company && !s.company_index(*s.strategic_company)) {
    errs.push_back("strategic_company '" + *s.strategic_company + "' names no company");
  }

  if (s.solver.restarts < 1) errs.push_back("solver.restarts must be >= 1");
  if (s.solver.max_evals < 1) errs.push_back("solver.max_evals must be >= 1");
  if (!finite(s.solver.grid_step) || s.solver.grid_step <= 0)
    errs.push_back("solver.grid_step must be > 0");
  if (!finite(s.reporting.eps_online) || s.reporting.eps_online < 0)
    errs.push_back("reporting.eps_online must be >= 0");
  return errs;
}

void require_valid(const Scenario& s) {
  auto errs = validate_scenario(s);
  if (errs.empty()) return;
  std::string msg = "invalid scenario:";
  for (const auto& e : errs) msg += "\n  - " + e;
  throw ValidationError(msg);
}

Scenario table1_scenario() {
  Scenario s;
  s.horizon = 24;
  s.period_hours = 1.0;
  s.k_max = 2.0;
  s.demand = {3.0, 2.8,  2.6,  2.5,  2.7,  3.2,  4.0,  5.0,  6.0,  7.5,  9.0,  10.0,
              10.5, 11.0, 11.5, 12.5, 13.8, 15.0, 14.2, 12.8, 11.2, 9.0, 6.5,  4.5};

  CompanyAssets co1;
  co1.id = "CO-1";
  co1.sg = {4.0, 2.0, 2.0, 2.0, 900.0};
  co1.bs = {0.6, 1.0, 0.4, 0.2, 0.9, 50.0};
  co1.wind_profile = {1.35, 1.32, 1.26, 1.2,  1.17, 1.14, 1.38, 1.68, 2.01, 1.5,  1.2, 1.05,
                      0.9,  0.75, 0.6,  0.45, 0.3,  0.15, 0.18, 0.24, 0.3,  0.45, 0.6, 0.75};

  CompanyAssets co2;
  co2.id = "CO-2";
  co2.sg = {5.0, 2.5, 2.5, 3.0, 600.0};
  co2.bs = {0.6, 1.0, 0.4, 0.2, 0.9, 50.0};
  co2.wind_profile = {1.49, 1.45, 1.39, 1.32, 1.29, 1.25, 1.52, 1.85, 2.21, 1.65, 1.32, 1.16,
                      0.99, 0.83, 0.66, 0.49, 0.33, 0.17, 0.2,  0.26, 0.33, 0.49, 0.66, 0.83};

  CompanyAssets co3;
  co3.id = "CO-3";
  co3.sg = {6.0, 3.0, 3.0, 4.0, 500.0};
  co3.bs = {1.2, 2.0, 0.4, 0.2, 0.9, 50.0};
  co3.wind_profile = {1.66, 1.63, 1.55, 1.48, 1.44, 1.41, 1.7,  2.07, 2.48, 1.85, 1.48, 1.29,
                      1.11, 0.92, 0.74, 0.56, 0.37, 0.18, 0.22, 0.3,  0.37, 0.56, 0.74, 0.92};

  s.companies = {co1, co2, co3};
  return s;
}

namespace {

json sg_to_json(const SgParams& g) {
  return {{"p_max", g.p_max},
          {"ramp_up", g.ramp_up},
          {"ramp_down", g.ramp_down},
          {"p_initial", g.p_initial},
          {"marginal_cost", g.marginal_cost}};
}

json bs_to_json(const BsParams& b) {
  return {{"p_max", b.p_max},
          {"e_max", b.e_max},
          {"soc_initial", b.soc_initial},
          {"soc_min", b.soc_min},
          {"soc_max", b.soc_max},
          {"levelized_cost", b.levelized_cost}};
}

double get_num(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw ValidationError("scenario json: missing or non-numeric '" + std::string(key) + "' in " + ctx);
  return j.at(key).get<double>();
}

std::vector<double> get_array(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw ValidationError("scenario json: missing or non-array '" + std::string(key) + "' in " + ctx);
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number())
      throw ValidationError("scenario json: non-numeric entry in '" + std::string(key) + "' in " + ctx);
    out.push_back(v.get<double>());
  }
  return out;
}

SgParams sg_from_json(const json& j, const std::string& ctx) {
  SgParams g;
  g.p_max = get_num(j, "p_max", ctx);
  g.ramp_up = get_num(j, "ramp_up", ctx);
  g.ramp_down = get_num(j, "ramp_down", ctx);
  g.p_initial = get_num(j, "p_initial", ctx);
  g.marginal_cost = get_num(j, "marginal_cost", ctx);
  return g;
}

BsParams bs_from_json(const json& j, const std::string& ctx) {
  BsParams b;
  b.p_max = get_num(j, "p_max", ctx);
  b.e_max = get_num(j, "e_max", ctx);
  b.soc_initial = get_num(j, "soc_initial", ctx);
  b.soc_min = get_num(j, "soc_min", ctx);
  b.soc_max = get_num(j, "soc_max", ctx);
  b.levelized_cost = get_num(j, "levelized_cost", ctx);
  return b;
}

}  // namespace

std::string scenario_to_json(const Scenario& s, int indent) {
  json j;
  j["horizon"] = s.horizon;
  j["period_hours"] = s.period_hours;
  j["demand"] = s.demand;
  j["companies"] = json::array();
  for (const auto& co : s.companies) {
    j["companies"].push_back({{"id", co.id},
                              {"sg", sg_to_json(co.sg)},
                              {"bs", bs_to_json(co.bs)},
                              {"wind_profile", co.wind_profile}});
  }
  if (s.strategic_company)
    j["strategic_company"] = *s.strategic_company;
  else
    j["strategic_company"] = nullptr;
  j["k_max"] = s.k_max;
  j["solver"] = {{"restarts", s.solver.restarts},
                 {"seed", s.solver.seed},
                 {"max_evals", s.solver.max_evals},
                 {"grid_step", s.solver.grid_step}};
  j["reporting"] = {{"eps_online", s.reporting.eps_online},
                    {"include_wind_revenue", s.reporting.include_wind_revenue}};
  return j.dump(indent);
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario json: parse error: ") + e.what());
  }
  Scenario s;
  if (!j.contains("horizon") || !j.at("horizon").is_number_integer())
    throw ValidationError("scenario json: missing integer 'horizon'");
  s.horizon = j.at("horizon").get<int>();
  s.period_hours = j.contains("period_hours") ? get_num(j, "period_hours", "scenario") : 1.0;
  s.demand = get_array(j, "demand", "scenario");
  if (!j.contains("companies") || !j.at("companies").is_array())
    throw ValidationError("scenario json: missing array 'companies'");
  for (const auto& jc : j.at("companies")) {
    CompanyAssets co;
    if (!jc.contains("id") || !jc.at("id").is_string())
      throw ValidationError("scenario json: company without string 'id'");
    co.id = jc.at("id").get<std::string>();
    const std::string ctx = "company " + co.id;
    if (!jc.contains("sg")) throw ValidationError("scenario json: missing 'sg' in " + ctx);
    if (!jc.contains("bs")) throw ValidationError("scenario json: missing 'bs' in " + ctx);
    co.sg = sg_from_json(jc.at("sg"), ctx);
    co.bs = bs_from_json(jc.at("bs"), ctx);
    co.wind_profile = get_array(jc, "wind_profile", ctx);
    s.companies.push_back(std::move(co));
  }
  if (j.contains("strategic_company") && !j.at("strategic_company").is_null()) {
    if (!j.at("strategic_company").is_string())
      throw ValidationError("scenario json: 'strategic_company' must be a string or null");
    s.strategic_company = j.at("strategic_company").get<std::string>();
  }
  if (j.contains("k_max")) s.k_max = get_num(j, "k_max", "scenario");
  if (j.contains("solver")) {
    const auto& js = j.at("solver");
    if (js.contains("restarts")) s.solver.restarts = js.at("restarts").get<int>();
    if (js.contains("seed")) s.solver.seed = js.at("seed").get<std::uint64_t>();
    if (js.contains("max_evals")) s.solver.max_evals = js.at("max_evals").get<int>();
    if (js.contains("grid_step")) s.solver.grid_step = js.at("grid_step").get<double>();
  }
  if (j.contains("reporting")) {
    const auto& jr = j.at("reporting");
    if (jr.contains("eps_online")) s.reporting.eps_online = jr.at("eps_online").get<double>();
    if (jr.contains("include_wind_revenue"))
      s.reporting.include_wind_revenue = jr.at("include_wind_revenue").get<bool>();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file: " + path);
  out << scenario_to_json(s) << "\n";
  if (!out) throw IoError("failed while writing scenario file: " + path);
}

}  // namespace marketsim
