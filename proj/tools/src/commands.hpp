#pragma once

#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace welfare_order::cli {

struct CommandOutput {
  Json report;
  // (file name, contents) to be written into the output directory.
  std::vector<std::pair<std::string, std::string>> files;
};

CommandOutput cmd_indices(const RunConfig& config);
CommandOutput cmd_simulate(const RunConfig& config);
CommandOutput cmd_exact(const RunConfig& config);
CommandOutput cmd_compare(const RunConfig& config);
CommandOutput cmd_converge(const RunConfig& config);

// Dispatches by name; throws ConfigError for an unknown command.
CommandOutput run_command(const std::string& name, const RunConfig& config);

// Creates dir if needed and writes every file of out.
void write_outputs(const CommandOutput& out, const std::string& dir);

// Runs the configured model for one allocation.
SimulationResult simulate_model(const RunConfig& config,
                                const WeightAllocation& alloc,
                                const RunOptions& run);

}  // namespace welfare_order::cli
