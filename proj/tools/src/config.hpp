#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "welfare_order/engine.hpp"
#include "welfare_order/extensions.hpp"
#include "welfare_order/model.hpp"
#include "welfare_order/oracle.hpp"

namespace welfare_order::cli {

/// One parsed run configuration. Fields a command does not use are ignored.
struct RunConfig {
  ModelKind model = ModelKind::kCorrelated;

  // Materialized society; absent when only a limit distribution is given
  // without n (indices) or for converge, which builds its own.
  std::optional<Society> society;
  std::optional<LimitDistribution> limit;
  std::optional<PatternSizes> pattern;  // society given as pattern + n
  std::uint64_t society_seed = 0;       // for limit-drawn societies

  std::vector<WeightAllocation> allocations;
  RepresentationRule rule = RepresentationRule::winner_take_all();
  std::optional<MarginDistribution> margin;
  IntensityModel intensity;
  std::optional<double> finite_population_scale;

  RunOptions run;
  bool write_samples = true;
  double alpha = 0.01;
  std::vector<std::size_t> n_values;
  ExactOptions exact;
};

/// Parses a JSON configuration document. Errors are ConfigError with a
/// field path ("society.sizes[2]") or line:column for syntax errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace welfare_order::cli
