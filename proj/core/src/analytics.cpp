#include "welfare_order/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "welfare_order/errors.hpp"

namespace welfare_order {
namespace {

constexpr double kRhoTolerance = 1e-12;
constexpr double kUnitCorrelation = 1e-14;

void check_aligned(std::span<const double> sizes,
                   std::span<const double> weights, const char* what) {
  if (sizes.size() != weights.size()) {
    throw ConfigError(std::string(what) + ": sizes and weights differ in length");
  }
  if (sizes.empty()) throw ConfigError(std::string(what) + ": no groups");
}

void check_positive_sizes(std::span<const double> sizes, const char* what) {
  for (double s : sizes) {
    if (!(s > 0.0)) {
      throw ConfigError(std::string(what) + ": sizes must be positive");
    }
  }
}

}  // namespace

double rho(const MarginDistribution& dist, const RepresentationRule& rule) {
  using RuleKind = RepresentationRule::Kind;
  using DistKind = MarginDistribution::Kind;
  if (rule.kind() == RuleKind::kProportional) return 1.0;
  if (rule.kind() == RuleKind::kWinnerTakeAll) {
    if (dist.kind() == DistKind::kRademacher) return 1.0;
    // E|X| = 1/2 and E X^2 = 1/3 for the uniform law.
    if (dist.kind() == DistKind::kUniform) return std::sqrt(3.0) / 2.0;
  }
  const auto jumps = rule.jump_points();
  const double cross = dist.expect_even(
      [&](double x) { return x * rule(x); }, jumps, kRhoTolerance);
  const double rule_second = dist.expect_even(
      [&](double x) { return rule(x) * rule(x); }, jumps, kRhoTolerance);
  const double denom = std::sqrt(dist.second_moment() * rule_second);
  if (!(denom > 0.0) || !(cross > 0.0)) {
    throw ConfigError("rho is not positive for rule " + rule.describe() +
                      " under margin " + dist.describe());
  }
  return std::min(1.0, cross / denom);
}

double cosine(std::span<const double> sizes, std::span<const double> weights) {
  check_aligned(sizes, weights, "cosine");
  double cross = 0.0, size_norm = 0.0, weight_norm = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    cross += sizes[i] * weights[i];
    size_norm += sizes[i] * sizes[i];
    weight_norm += weights[i] * weights[i];
  }
  if (!(size_norm > 0.0) || !(weight_norm > 0.0)) {
    throw ConfigError("cosine: zero-norm size or weight vector");
  }
  return std::min(1.0, cross / std::sqrt(size_norm * weight_norm));
}

double cosine_limit(const LimitDistribution& limit_dist,
                    const WeightAllocation& law) {
  const double cross =
      limit_dist.expect([&](double s) { return s * law.weight_for_size(s); });
  const double size_second = limit_dist.expect([](double s) { return s * s; });
  const double weight_second = limit_dist.expect([&](double s) {
    const double a = law.weight_for_size(s);
    return a * a;
  });
  if (!(weight_second > 0.0)) {
    throw ConfigError("cosine_limit: weight law vanishes on the support");
  }
  return std::min(1.0, cross / std::sqrt(size_second * weight_second));
}

double lambda_param(double rho, double c_star) {
  const double x = rho * c_star;
  if (std::abs(x) >= 1.0 - kUnitCorrelation) {
    return x > 0.0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
  }
  return x / std::sqrt(1.0 - x * x);
}

AsymptoticProfile asymptotic_objectives(double rho, double c_star) {
  AsymptoticProfile profile;
  profile.rho = rho;
  profile.c_star = c_star;
  profile.lambda = lambda_param(rho, c_star);
  const double x = std::clamp(rho * c_star, -1.0, 1.0);
  profile.u_limit = std::sqrt(2.0 / std::numbers::pi) * x;
  profile.delta_limit = (1.0 - x) / std::sqrt(2.0 * std::numbers::pi);
  profile.p_limit = std::acos(x) / std::numbers::pi;
  return profile;
}

double sqrt_cosine_limit(const LimitDistribution& limit_dist,
                         const WeightAllocation& law) {
  const double cross = limit_dist.expect(
      [&](double s) { return std::sqrt(s) * law.weight_for_size(s); });
  const double size_mean = limit_dist.expect([](double s) { return s; });
  const double weight_second = limit_dist.expect([&](double s) {
    const double a = law.weight_for_size(s);
    return a * a;
  });
  if (!(weight_second > 0.0)) {
    throw ConfigError("sqrt_cosine_limit: weight law vanishes on the support");
  }
  return std::min(1.0, cross / std::sqrt(size_mean * weight_second));
}

double sqrt_cosine(std::span<const double> sizes,
                   std::span<const double> weights) {
  check_aligned(sizes, weights, "sqrt_cosine");
  check_positive_sizes(sizes, "sqrt_cosine");
  double cross = 0.0, size_total = 0.0, weight_square = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    cross += std::sqrt(sizes[i]) * weights[i];
    size_total += sizes[i];
    weight_square += weights[i] * weights[i];
  }
  if (!(weight_square > 0.0)) throw ConfigError("sqrt_cosine: all weights are zero");
  return std::min(1.0, cross / std::sqrt(size_total * weight_square));
}

double hat_c_sqrt(std::span<const double> sizes,
                  std::span<const double> weights) {
  check_aligned(sizes, weights, "hat_c_sqrt");
  check_positive_sizes(sizes, "hat_c_sqrt");
  double weight_total = 0.0, size_total = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    weight_total += weights[i];
    size_total += sizes[i];
  }
  const double index = sainte_lague(sizes, weights);
  if (!(index > 0.0)) throw ConfigError("hat_c_sqrt: all weights are zero");
  return std::min(1.0, weight_total / std::sqrt(size_total * index));
}

double sainte_lague(std::span<const double> sizes,
                    std::span<const double> weights) {
  check_aligned(sizes, weights, "sainte_lague");
  check_positive_sizes(sizes, "sainte_lague");
  double total = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    total += weights[i] * weights[i] / sizes[i];
  }
  return total;
}

}  // namespace welfare_order
