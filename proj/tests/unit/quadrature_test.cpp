#include "welfare_order/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "welfare_order/errors.hpp"

namespace welfare_order {
namespace {

TEST(Quadrature, Polynomials) {
  EXPECT_NEAR(quadrature([](double x) { return x * x; }, 0.0, 3.0, 1e-13), 9.0,
              1e-12);
  EXPECT_NEAR(quadrature([](double x) { return std::pow(x, 7); }, -1.0, 2.0,
                         1e-13),
              (256.0 - 1.0) / 8.0, 1e-11);
}

TEST(Quadrature, ReversedBounds) {
  EXPECT_NEAR(quadrature([](double x) { return std::exp(x); }, 1.0, 0.0, 1e-13),
              1.0 - std::exp(1.0), 1e-12);
}

TEST(Quadrature, GaussianIntegral) {
  const double value = quadrature(
      [](double x) { return std::exp(-0.5 * x * x); }, -40.0, 40.0, 1e-13);
  EXPECT_NEAR(value, std::sqrt(2.0 * std::numbers::pi), 1e-12);
}

TEST(Quadrature, StepFunctionWithBreakpoints) {
  auto step = [](double x) { return x < 0.3 ? 0.0 : (x < 0.7 ? 0.5 : 1.0); };
  const std::vector<double> cuts{0.3, 0.7};
  EXPECT_NEAR(quadrature(step, 0.0, 1.0, 1e-14, cuts), 0.2 + 0.3, 1e-14);
}

TEST(Quadrature, StepFunctionWithoutBreakpointsStillConverges) {
  auto step = [](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; };
  EXPECT_NEAR(quadrature(step, 0.0, 1.0, 1e-10), 2.0 / 3.0, 1e-9);
}

TEST(Quadrature, SquareRootSingularity) {
  const double value =
      quadrature([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(value, 2.0, 1e-8);
}

TEST(Quadrature, ReportsEvaluations) {
  const auto result = integrate_adaptive([](double x) { return std::sin(x); },
                                         0.0, std::numbers::pi, 1e-12);
  EXPECT_NEAR(result.value, 2.0, 1e-12);
  EXPECT_GT(result.evaluations, 0);
  EXPECT_GE(result.intervals, 1);
  EXPECT_LE(result.error, 1e-12);
}

TEST(Quadrature, NonConvergenceThrowsWithEstimate) {
  QuadratureOptions options;
  options.max_depth = 3;
  try {
    integrate_adaptive([](double x) { return std::sin(1.0 / (x + 1e-9)); }, 0.0,
                       1.0, 1e-14, {}, options);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_TRUE(std::isfinite(e.best_estimate()));
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

}  // namespace
}  // namespace welfare_order
