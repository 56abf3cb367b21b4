#pragma once

#include <string>
#include <vector>

#include "marketsim/types.hpp"

namespace marketsim {

/// Checks every scenario invariant and returns the full list of violations.
/// An empty list means the scenario is valid. Pure function, safe to call
/// repeatedly.
std::vector<std::string> validate_scenario(const Scenario& s);

/// Throws ValidationError listing all violations if the scenario is invalid.
void require_valid(const Scenario& s);

/// The bundled three-company case study: generator and storage parameters
/// from the reference data set, a 24 h synthetic demand profile peaking at
/// 15 MW (the combined generator rated capacity) at hour 18, and per-company
/// wind profiles that cover demand during the first nine hours.
Scenario table1_scenario();

// JSON (de)serialization. Field names match the struct members one to one.
std::string scenario_to_json(const Scenario& s, int indent = 2);
Scenario scenario_from_json(const std::string& text);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace marketsim
