#ifndef IONTRAP_SCENARIOS_HPP
#define IONTRAP_SCENARIOS_HPP

#include "iontrap/cli_config.hpp"
#include "iontrap/csv.hpp"

namespace iontrap {

inline constexpr const char* artifact_version = "iontrap 1.0.0";

struct ScenarioResult {
  CsvTable table;
  ConfigErrors errors;  // config-level problems (exit status 1)
};

// Dispatches a validated RunConfig to one of the scenarios
// {rate, stability, secular, chain, lock, servo, dynamics}. Numerical
// failures propagate as exceptions (exit status 2).
ScenarioResult run_scenario(const RunConfig& config);

}  // namespace iontrap

#endif
