#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marketsim/analytics.hpp"
#include "marketsim/bilevel.hpp"
#include "marketsim/types.hpp"

namespace marketsim {

/// A batch of cases to simulate against one scenario file. Case names are
/// "pcm" or "icm:<company id>".
struct RunManifest {
  std::string scenario_path;
  std::vector<std::string> cases;
  std::string out_dir;
  std::optional<SearchConfig> solver_override;
};

RunManifest manifest_from_json(const std::string& text);
RunManifest load_manifest(const std::string& path);

struct CaseResult {
  std::string name;
  DispatchResult dispatch;
  MarketReport report;
  std::optional<BilevelSolution> bilevel;  // strategic cases only
};

/// Truthful clearing: every company offers its true marginal cost.
CaseResult run_pcm(const Scenario& s);

/// Strategic clearing: the named company solves the bidding problem, all
/// others stay truthful.
CaseResult run_icm(const Scenario& s, const std::string& strategic);

/// Runs a named case ("pcm" or "icm:<id>").
CaseResult run_case(const Scenario& s, const std::string& case_name);

struct SuiteResult {
  std::vector<CaseResult> cases;
  std::string out_dir;
};

/// Runs every case in the manifest and writes the artifact set: one
/// directory per case with dispatch.csv and summary.json, a cross-case
/// summary table (CSV and JSON), and four comparison figures (Lerner index,
/// prices, both reserve types by hour). The output directory is verified
/// writable before any solving starts.
SuiteResult run_suite(const RunManifest& m);

}  // namespace marketsim
