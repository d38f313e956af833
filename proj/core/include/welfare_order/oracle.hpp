#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "welfare_order/engine.hpp"
#include "welfare_order/model.hpp"

namespace welfare_order {

enum class ExactMode {
  kAuto,      // rational when sizes and weights are integers and the
              // enumeration is small, float otherwise
  kRational,  // boost cpp_rational throughout
  kFloat,
};

struct ExactOptions {
  // Enumeration cost bound, counted as profiles x groups.
  double budget = 1e8;
  ExactMode mode = ExactMode::kAuto;
};

struct ExactAtom {
  double value = 0.0;  // welfare
  double probability = 0.0;
  // Rational mode only: value = numerator / sigma, both as "p/q" strings.
  std::string numerator;
  std::string probability_exact;
};

/// Exact law of W for a small society with a discrete margin distribution.
struct ExactDistribution {
  std::vector<ExactAtom> atoms;  // ascending by value, values distinct
  double u = 0.0;
  double delta = 0.0;
  double p = 0.0;
  // E[W^2] is 1 by construction; these are the exact second moments used for
  // null standard errors.
  double var_w = 0.0;
  double var_gap = 0.0;  // Var of max(-W, 0)

  bool rational = false;
  // Rational mode: sigma^2 and u, delta as "p/q / sqrt(sigma^2)", p as "p/q".
  std::string sigma_squared_exact;
  std::string u_exact;
  std::string delta_exact;
  std::string p_exact;

  double sigma = 0.0;
  std::uint64_t profiles = 0;
  double total_probability = 0.0;
};

ExactDistribution exact_welfare(const Society& society,
                                const WeightAllocation& alloc,
                                const RepresentationRule& rule,
                                const MarginDistribution& margin,
                                const ExactOptions& options = {});

struct ExactComparison {
  ExactDistribution exact;
  ObjectiveEstimates estimates;
  std::uint64_t samples = 0;
  double u_gap = 0.0;
  double delta_gap = 0.0;
  double p_gap = 0.0;
  // Standard errors of the estimators under the exact law.
  double u_se_exact = 0.0;
  double delta_se_exact = 0.0;
  double p_se_exact = 0.0;
  bool u_within = false;
  bool delta_within = false;
  bool p_within = false;

  bool all_within() const noexcept { return u_within && delta_within && p_within; }
};

// Gaps are judged against 4 standard errors under the exact law.
inline constexpr double kComparisonSigmas = 4.0;

ExactComparison exact_vs_simulation(const SimulationSpec& spec,
                                    const ExactOptions& options = {});

}  // namespace welfare_order
