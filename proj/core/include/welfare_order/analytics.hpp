#pragma once

#include <span>

#include "welfare_order/model.hpp"

namespace welfare_order {

/// Corr(X, r(X)) for a margin law and a representation rule. Exact sums for
/// discrete laws, closed forms for the named continuous pairs, quadrature
/// split at the rule's jump points otherwise. Throws ConfigError when the
/// result is not positive (an invalid rule).
double rho(const MarginDistribution& dist, const RepresentationRule& rule);

/// Cosine of the angle between the size vector and the weight vector.
double cosine(std::span<const double> sizes, std::span<const double> weights);

/// Limit of cosine() when sizes follow limit_dist and weights follow a law.
double cosine_limit(const LimitDistribution& limit_dist,
                    const WeightAllocation& law);

/// lambda = x / sqrt(1 - x^2) with x = rho * c_star; +-inf at |x| = 1.
double lambda_param(double rho, double c_star);

struct AsymptoticProfile {
  double rho = 0.0;
  double c_star = 0.0;
  double lambda = 0.0;
  double u_limit = 0.0;      // sqrt(2/pi) rho c*
  double delta_limit = 0.0;  // (1 - rho c*) / sqrt(2 pi)
  double p_limit = 0.0;      // arccos(rho c*) / pi
};

AsymptoticProfile asymptotic_objectives(double rho, double c_star);

/// Square-root cosine index of the independent-preference model, taken
/// against the limit size distribution.
double sqrt_cosine_limit(const LimitDistribution& limit_dist,
                         const WeightAllocation& law);

/// Finite-n counterpart: sum sqrt(s_i) a_i / sqrt(sum s_i * sum a_i^2). Orders
/// allocations under winner-take-all in the independent-preference model.
double sqrt_cosine(std::span<const double> sizes,
                   std::span<const double> weights);

/// sum a_i / sqrt(sum s_i * sum a_i^2 / s_i). Orders allocations under
/// proportional representation in the independent-preference model.
double hat_c_sqrt(std::span<const double> sizes,
                  std::span<const double> weights);

/// Sainte-Lague disproportionality sum a_i^2 / s_i.
double sainte_lague(std::span<const double> sizes,
                    std::span<const double> weights);

}  // namespace welfare_order
