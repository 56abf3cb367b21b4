#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "marketsim/bilevel.hpp"
#include "marketsim/errors.hpp"
#include "marketsim/runner.hpp"
#include "marketsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolve = 2;
constexpr int kExitIo = 3;

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const marketsim::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const marketsim::SolveError& e) {
    std::cerr << "solve error: " << e.what() << "\n";
    return kExitSolve;
  } catch (const marketsim::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electricity market simulator: truthful and strategic clearing"};
  app.require_subcommand(1);

  // simulate
  std::string manifest_path, scenario_path, case_name, out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run one case or a manifest of cases");
  auto* opt_manifest = simulate->add_option("--manifest", manifest_path, "Manifest JSON file");
  auto* opt_scenario = simulate->add_option("--scenario", scenario_path, "Scenario JSON file");
  auto* opt_case =
      simulate->add_option("--case", case_name, "Case to run: pcm or icm:<company id>");
  auto* opt_out = simulate->add_option("--out", out_dir, "Output directory");
  opt_scenario->needs(opt_case)->needs(opt_out);
  opt_manifest->excludes(opt_scenario);

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario file against all invariants");
  validate->add_option("--scenario", validate_path, "Scenario JSON file")->required();

  // oracle
  std::string oracle_path;
  double grid_step = 0.01;
  auto* oracle =
      app.add_subcommand("oracle", "Exhaustive grid search over bids (short horizons only)");
  oracle->add_option("--scenario", oracle_path, "Scenario JSON file")->required();
  oracle->add_option("--grid-step", grid_step, "Bid multiplier grid step (default 0.01)");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    return run_guarded([&] {
      marketsim::RunManifest m;
      if (!manifest_path.empty()) {
        m = marketsim::load_manifest(manifest_path);
      } else if (!scenario_path.empty()) {
        m.scenario_path = scenario_path;
        m.cases = {case_name};
        m.out_dir = out_dir;
      } else {
        throw marketsim::ValidationError("simulate needs --manifest or --scenario/--case/--out");
      }
      auto suite = marketsim::run_suite(m);
      std::cout << "wrote " << suite.cases.size() << " case(s) to " << suite.out_dir << "\n";
      return kExitOk;
    });
  }

  if (validate->parsed()) {
    return run_guarded([&] {
      auto s = marketsim::load_scenario(validate_path);
      auto errs = marketsim::validate_scenario(s);
      if (errs.empty()) {
        std::cout << "valid\n";
        return kExitOk;
      }
      for (const auto& e : errs) std::cout << "invalid: " << e << "\n";
      return kExitValidation;
    });
  }

  return run_guarded([&] {
    auto s = marketsim::load_scenario(oracle_path);
    marketsim::require_valid(s);
    auto sol = marketsim::brute_force_bilevel(s, grid_step);
    nlohmann::json j;
    j["bids"] = sol.bids.k;
    j["strategic_profit"] = sol.strategic_profit;
    j["evaluations"] = sol.stats.evaluations;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  });
}
