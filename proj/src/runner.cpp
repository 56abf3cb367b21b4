#include "marketsim/runner.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "marketsim/clearing.hpp"
#include "marketsim/errors.hpp"
#include "marketsim/report_io.hpp"
#include "marketsim/scenario.hpp"

namespace marketsim {

namespace fs = std::filesystem;
using nlohmann::json;

RunManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("manifest json: parse error: ") + e.what());
  }
  RunManifest m;
  if (!j.contains("scenario") || !j.at("scenario").is_string())
    throw ValidationError("manifest json: missing string 'scenario'");
  m.scenario_path = j.at("scenario").get<std::string>();
  if (!j.contains("cases") || !j.at("cases").is_array() || j.at("cases").empty())
    throw ValidationError("manifest json: 'cases' must be a non-empty array");
  for (const auto& c : j.at("cases")) {
    if (!c.is_string()) throw ValidationError("manifest json: case entries must be strings");
    m.cases.push_back(c.get<std::string>());
  }
  if (!j.contains("out_dir") || !j.at("out_dir").is_string())
    throw ValidationError("manifest json: missing string 'out_dir'");
  m.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("solver")) {
    SearchConfig cfg;
    const auto& js = j.at("solver");
    if (js.contains("restarts")) cfg.restarts = js.at("restarts").get<int>();
    if (js.contains("seed")) cfg.seed = js.at("seed").get<std::uint64_t>();
    if (js.contains("max_evals")) cfg.max_evals = js.at("max_evals").get<int>();
    if (js.contains("grid_step")) cfg.grid_step = js.at("grid_step").get<double>();
    m.solver_override = cfg;
  }
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

CaseResult run_pcm(const Scenario& s) {
  Scenario pcm = s;
  pcm.strategic_company.reset();
  require_valid(pcm);
  CaseResult r;
  r.name = "pcm";
  r.dispatch = clear_market(pcm, std::nullopt);
  r.report = economic_report(pcm, r.dispatch);
  return r;
}

CaseResult run_icm(const Scenario& s, const std::string& strategic) {
  Scenario icm = s;
  icm.strategic_company = strategic;
  require_valid(icm);
  CaseResult r;
  r.name = "icm:" + strategic;
  r.bilevel = solve_bilevel(icm);
  r.dispatch = r.bilevel->dispatch;
  r.report = economic_report(icm, r.dispatch, r.bilevel->bids);
  return r;
}

CaseResult run_case(const Scenario& s, const std::string& case_name) {
  if (case_name == "pcm") return run_pcm(s);
  if (case_name.rfind("icm:", 0) == 0) return run_icm(s, case_name.substr(4));
  throw ValidationError("unknown case '" + case_name + "' (expected 'pcm' or 'icm:<company>')");
}

namespace {

std::string case_dir_name(std::string name) {
  for (char& ch : name)
    if (ch == ':' || ch == '/' || ch == '\\') ch = '_';
  return name;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed while writing " + path.string());
}

std::string cross_case_csv(const Scenario& s, const std::vector<CaseResult>& cases) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v == 0.0 ? 0.0 : v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "indicator";
  for (const auto& c : cases) os << ',' << c.name;
  os << '\n';
  os << "energy_fee_kyen";
  for (const auto& c : cases) os << ',' << num(c.report.energy_fee / 1000.0);
  os << '\n';
  for (std::size_t i = 0; i < s.companies.size(); ++i) {
    os << "profit_kyen:" << s.companies[i].id;
    for (const auto& c : cases) os << ',' << num(c.report.company_profit[i] / 1000.0);
    os << '\n';
  }
  os << "lerner_mean";
  for (const auto& c : cases) os << ',' << num(c.report.lerner.mean);
  os << '\n';
  os << "avg_reserve_type1_mw";
  for (const auto& c : cases) os << ',' << num(c.report.reserve.avg_type1);
  os << '\n';
  os << "avg_reserve_type2_mw";
  for (const auto& c : cases) os << ',' << num(c.report.reserve.avg_type2);
  os << '\n';
  return os.str();
}

json cross_case_json(const Scenario& s, const std::vector<CaseResult>& cases) {
  json j;
  j["cases"] = json::array();
  for (const auto& c : cases) {
    json jc;
    jc["name"] = c.name;
    jc["energy_fee_kyen"] = c.report.energy_fee / 1000.0;
    json profits = json::object();
    for (std::size_t i = 0; i < s.companies.size(); ++i)
      profits[s.companies[i].id] = c.report.company_profit[i] / 1000.0;
    jc["profit_kyen"] = profits;
    jc["lerner_mean"] = c.report.lerner.mean;
    jc["avg_reserve_type1_mw"] = c.report.reserve.avg_type1;
    jc["avg_reserve_type2_mw"] = c.report.reserve.avg_type2;
    j["cases"].push_back(jc);
  }
  return j;
}

}  // namespace

SuiteResult run_suite(const RunManifest& m) {
  if (m.cases.empty()) throw ValidationError("manifest has no cases");

  Scenario base = load_scenario(m.scenario_path);
  if (m.solver_override) base.solver = *m.solver_override;
  require_valid(base);

  // Fail before any solving if the output location is unusable.
  const fs::path out_dir(m.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  {
    const fs::path probe = out_dir / ".write_probe";
    std::ofstream f(probe);
    if (!f) throw IoError("output directory is not writable: " + out_dir.string());
    f.close();
    fs::remove(probe, ec);
  }
  for (const auto& name : m.cases) {
    fs::create_directories(out_dir / "cases" / case_dir_name(name), ec);
    if (ec) throw IoError("cannot create case directory for " + name + ": " + ec.message());
  }

  SuiteResult suite;
  suite.out_dir = m.out_dir;
  for (const auto& name : m.cases) {
    CaseResult r = run_case(base, name);
    const fs::path dir = out_dir / "cases" / case_dir_name(name);
    write_file(dir / "dispatch.csv", dispatch_csv(base, r.dispatch, r.report.reserve));
    write_file(dir / "summary.json",
               summary_json(name, base, r.report, r.bilevel ? &*r.bilevel : nullptr));
    suite.cases.push_back(std::move(r));
  }

  write_file(out_dir / "summary.csv", cross_case_csv(base, suite.cases));
  write_file(out_dir / "summary.json", cross_case_json(base, suite.cases).dump(2) + "\n");

  std::vector<std::pair<std::string, std::vector<double>>> lerner, prices, res1, res2;
  for (const auto& c : suite.cases) {
    lerner.emplace_back(c.name, c.report.lerner.series);
    prices.emplace_back(c.name, c.report.prices);
    res1.emplace_back(c.name, c.report.reserve.system_type1);
    res2.emplace_back(c.name, c.report.reserve.system_type2);
  }
  write_file(out_dir / "fig_lerner.svg", svg_line_chart("Lerner index by hour", "L_t", lerner));
  write_file(out_dir / "fig_prices.svg",
             svg_line_chart("Energy clearing prices by hour", "yen/MWh", prices));
  write_file(out_dir / "fig_reserve_type1.svg",
             svg_line_chart("System reserve capacity, type I", "MW", res1));
  write_file(out_dir / "fig_reserve_type2.svg",
             svg_line_chart("System reserve capacity, type II", "MW", res2));
  return suite;
}

}  // namespace marketsim
