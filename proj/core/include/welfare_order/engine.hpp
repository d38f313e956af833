#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "welfare_order/analytics.hpp"
#include "welfare_order/model.hpp"
#include "welfare_order/stats.hpp"

namespace welfare_order {

enum class ModelKind { kCorrelated, kIntensity, kIndependent };
std::string_view to_string(ModelKind kind);

/// Execution parameters shared by every simulation entry point. Results are
/// a function of (seed, samples) only; chunk_size and threads affect speed.
struct RunOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::uint64_t chunk_size = 65536;
  unsigned threads = 0;  // 0 = hardware concurrency
  // Above this many samples only moments and a CDF sketch are kept.
  std::uint64_t sample_cap = 10'000'000;
  // Also keep welfare and S/sigma in generation order (for CSV export).
  bool keep_order = false;
  // Negate every margin draw and tie-breaking coin (paired antithetic run).
  bool antithetic = false;
};

struct SimulationSpec {
  Society society;
  WeightAllocation alloc;
  RepresentationRule rule;
  MarginDistribution margin;
  RunOptions run;
};

// Throws ConfigError on an invalid rule, empty run or misaligned weights.
void validate_spec(const SimulationSpec& spec);

/// Streaming sums over a run, accumulated in fixed blocks of samples and
/// merged in sample order so that they do not depend on scheduling.
struct SampleMoments {
  std::uint64_t count = 0;
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  double sum_abs_s = 0.0;   // sum of |S| / sigma
  double sum_gap = 0.0;     // sum of (|S|/sigma - W) / 2
  double sum_gap2 = 0.0;
  double sum_s = 0.0;       // sum of S / sigma
  double sum_s2 = 0.0;      // sum of (S / sigma)^2
  std::uint64_t negatives = 0;  // W < 0
  std::uint64_t ties = 0;

  void add(double w, double s_norm, bool tie) noexcept;
  void merge(const SampleMoments& other) noexcept;
};

SampleMoments moments_from_samples(std::span<const double> welfare,
                                   std::span<const double> s_norm);

struct ObjectiveEstimates {
  double u_hat = 0.0;
  double delta_hat = 0.0;
  double p_hat = 0.0;
  double u_se = 0.0;
  double delta_se = 0.0;
  double p_se = 0.0;
  double mean_abs_s = 0.0;  // mean |S| / sigma
};

struct SimulationResult {
  ModelKind model = ModelKind::kCorrelated;
  EmpiricalWelfare welfare;
  EmpiricalWelfare s_norm;  // S / sigma
  ObjectiveEstimates estimates;
  SampleMoments moments;
  std::uint64_t tie_count = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  std::size_t groups = 0;
  // Generation order; filled only with RunOptions::keep_order.
  std::vector<double> ordered_welfare;
  std::vector<double> ordered_s_norm;
};

/// One sample of the two-stage vote.
struct SampleDraw {
  double s = 0.0;  // total vote margin
  double t = 0.0;  // total weight margin
  int decision = 0;
  bool tie = false;
  double w = 0.0;  // D S / sigma
  double s_norm = 0.0;
};

SimulationResult simulate(const SimulationSpec& spec);
SampleDraw draw_sample(const SimulationSpec& spec, std::uint64_t index);

/// u, delta, p with standard errors (sample std / sqrt(m); binomial for p).
/// Standard errors are +inf for a single sample.
ObjectiveEstimates estimate_objectives(const SampleMoments& moments);
ObjectiveEstimates estimate_objectives(const SimulationResult& result);

/// How a convergence sweep builds the n-group society.
struct PatternSizes {
  std::vector<double> sizes;
  // Explicit weights repeated alongside sizes; empty means use the base
  // allocation's law.
  std::vector<double> weights;
};
struct LimitSizes {
  LimitDistribution limit;
  std::uint64_t seed = 0;  // sizes for n use derive_seed(seed, n)
};
using SocietyGenerator = std::variant<PatternSizes, LimitSizes>;

struct ConvergenceRow {
  std::size_t n = 0;
  double cosine = 0.0;
  AsymptoticProfile limits;
  ObjectiveEstimates estimates;
  double u_gap = 0.0;
  double delta_gap = 0.0;
  double p_gap = 0.0;
  double ks = 0.0;  // KS distance of welfare to SN(lambda_a)
  std::uint64_t tie_count = 0;
};

std::vector<ConvergenceRow> convergence_sweep(
    const SimulationSpec& base, std::span<const std::size_t> n_values,
    const SocietyGenerator& generator);

}  // namespace welfare_order
