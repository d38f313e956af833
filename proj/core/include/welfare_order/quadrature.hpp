#pragma once

#include <functional>
#include <span>

namespace welfare_order {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of |K15 - G7| over the final partition
  int evaluations = 0;
  int intervals = 0;
};

struct QuadratureOptions {
  int max_depth = 60;
  int max_intervals = 20000;
};

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature of f over [a, b].
///
/// The interval is first split at every breakpoint strictly inside (a, b);
/// the subinterval with the largest error estimate is then bisected until the
/// summed estimate is at most tol. Throws QuadratureError, carrying the best
/// estimate, if an interval would exceed max_depth bisections.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    std::span<const double> breakpoints = {},
                                    const QuadratureOptions& options = {});

// Convenience wrapper returning only the value.
double quadrature(const std::function<double(double)>& f, double a, double b,
                  double tol, std::span<const double> breakpoints = {});

}  // namespace welfare_order
