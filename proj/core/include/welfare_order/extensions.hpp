#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "welfare_order/engine.hpp"
#include "welfare_order/model.hpp"

namespace welfare_order {

/// Symmetric idiosyncratic-noise law G_eps on [-scale, scale].
class EpsilonDistribution {
 public:
  enum class Kind { kUniform, kSymmetricBeta, kTable };

  static EpsilonDistribution uniform(double scale = 1.0);
  // eps = scale * (2B - 1), B ~ Beta(shape, shape).
  static EpsilonDistribution symmetric_beta(double shape, double scale = 1.0);
  // Piecewise-linear CDF through (points[j], cdf[j]); points must be
  // symmetric about 0 with cdf running from 0 to 1 and G(-x) = 1 - G(x).
  static EpsilonDistribution table(std::vector<double> points,
                                   std::vector<double> cdf);

  Kind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }

  double cdf(double x) const;
  // 2 G(x) - 1.
  double signed_margin(double x) const;
  // Points where G is not smooth.
  std::vector<double> kinks() const;
  std::string describe() const;

 private:
  EpsilonDistribution(Kind kind, double scale) : kind_(kind), scale_(scale) {}

  Kind kind_;
  double scale_;
  double shape_ = 1.0;
  std::vector<double> points_;
  std::vector<double> cdf_;
};

/// Preference intensities: Theta = theta_scale * X with X drawn from a margin
/// law on [-1, 1]; the rule sees Theta / theta_scale.
struct IntensityModel {
  MarginDistribution theta = MarginDistribution::uniform();
  double theta_scale = 1.0;
  EpsilonDistribution epsilon = EpsilonDistribution::uniform();
};

void validate_intensity(const IntensityModel& model);

// E[(2 G_eps(Theta) - 1)^2].
double intensity_second_moment(const IntensityModel& model);

// Corr(2 G_eps(Theta) - 1, r(Theta / theta_scale)).
double rho_intensity(const IntensityModel& model,
                     const RepresentationRule& rule);

SimulationResult simulate_intensity(const IntensityModel& model,
                                    const Society& society,
                                    const WeightAllocation& alloc,
                                    const RepresentationRule& rule,
                                    const RunOptions& run);
SampleDraw draw_intensity_sample(const IntensityModel& model,
                                 const Society& society,
                                 const WeightAllocation& alloc,
                                 const RepresentationRule& rule,
                                 std::uint64_t seed, std::uint64_t index);

/// Independent preferences: group margins N_i / sqrt(s_i) with N_i standard
/// normal. With finite_population_scale = k, group i instead casts
/// round(k s_i) fair +-1 ballots and X_i = sqrt(k) * (ballot margin share).
struct IndepModel {
  std::vector<double> sizes;
  RepresentationRule rule = RepresentationRule::winner_take_all();
  std::optional<double> finite_population_scale;
};

void validate_indep(const IndepModel& model, std::span<const double> weights);

SimulationResult simulate_indep(const IndepModel& model,
                                std::span<const double> weights,
                                const RunOptions& run);
SampleDraw draw_indep_sample(const IndepModel& model,
                             std::span<const double> weights,
                             std::uint64_t seed, std::uint64_t index);

// arccos(sqrt(2/pi) c) / pi for c in [0, 1].
double indep_asymptotic_p(double c_sqrt_star);

}  // namespace welfare_order
