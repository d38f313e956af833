#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "welfare_order/quadrature.hpp"

namespace welfare_order {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

double normal_pdf(double x);
double normal_cdf(double x);

/// Skew-normal law SN(lambda) with density 2 phi(x) Phi(lambda x).
/// lambda = +inf / -inf are the half-normal limits on [0, inf) / (-inf, 0].
struct SkewNormal {
  double lambda = 0.0;
};

double sn_pdf(SkewNormal sn, double x);

/// H(x; lambda) by adaptive quadrature of sn_pdf, absolute error <= 1e-10.
double sn_cdf(SkewNormal sn, double x);

/// H at every point of an ascending sequence, accumulated piecewise between
/// consecutive points (one quadrature per gap instead of one per point).
std::vector<double> sn_cdf_sorted(SkewNormal sn, std::span<const double> xs);

double sn_mean(SkewNormal sn);

struct MonotoneCheckReport {
  bool pass = true;
  // (lambda index, x index) pairs where H(x; lambda_{k+1}) >= H(x; lambda_k)
  // beyond the tolerance.
  std::vector<std::pair<std::size_t, std::size_t>> failures;
};

/// Checks that H(x; lambda) is strictly decreasing along an ascending lambda
/// grid at every x: successive differences must be below tol.
MonotoneCheckReport sn_cdf_monotone_check(std::span<const double> lambda_grid,
                                          std::span<const double> x_grid,
                                          double tol = 1e-12);

/// Fixed-width histogram on [lo, hi) with underflow and overflow counters,
/// used as a CDF sketch when a run is too large to keep every sample.
class CdfSketch {
 public:
  static constexpr double kDefaultLow = -12.0;
  static constexpr double kDefaultHigh = 12.0;
  static constexpr std::size_t kDefaultBins = 10000;
  // Additional CDF error that callers must allow for a sketch.
  static constexpr double kExtraTolerance = 1e-3;

  CdfSketch(double lo = kDefaultLow, double hi = kDefaultHigh,
            std::size_t bins = kDefaultBins);

  void add(double x) noexcept;
  void merge(const CdfSketch& other);

  std::uint64_t count() const noexcept { return total_; }
  double low() const noexcept { return lo_; }
  double high() const noexcept { return hi_; }
  std::size_t bins() const noexcept { return counts_.size(); }
  double edge(std::size_t k) const noexcept {
    return lo_ + (hi_ - lo_) * static_cast<double>(k) /
                     static_cast<double>(counts_.size());
  }
  // Fraction of samples below edge(k), k = 0..bins.
  double cdf_at_edge(std::size_t k) const;
  // Piecewise-linear interpolation between edges.
  double cdf(double x) const;

 private:
  double lo_, hi_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0, overflow_ = 0, total_ = 0;
  // Cumulative counts below each edge, rebuilt after mutation.
  mutable std::vector<std::uint64_t> below_edge_;
  mutable bool below_edge_valid_ = false;

  void rebuild() const;
};

/// Realized sample of welfare (or any scalar) values with CDF queries.
///
/// Holds either the full sorted sample or, for oversized runs, a CdfSketch.
class EmpiricalWelfare {
 public:
  EmpiricalWelfare() = default;
  static EmpiricalWelfare from_samples(std::vector<double> samples);
  static EmpiricalWelfare from_sketch(CdfSketch sketch, double mean);

  std::uint64_t count() const noexcept;
  bool is_sketch() const noexcept { return sketch_.has_value(); }
  std::span<const double> samples() const noexcept { return samples_; }
  const CdfSketch& sketch() const;

  // Right-continuous empirical CDF P{W <= x}.
  double cdf(double x) const;
  // P{W < x}.
  double cdf_left(double x) const;
  double mean() const noexcept { return mean_; }
  // Points where the CDF can jump (sample values or sketch edges).
  std::vector<double> evaluation_points() const;
  double extra_tolerance() const noexcept {
    return is_sketch() ? CdfSketch::kExtraTolerance : 0.0;
  }

  // Free-form provenance (seed, model description).
  std::uint64_t seed = 0;
  std::string description;

 private:
  std::vector<double> samples_;
  std::optional<CdfSketch> sketch_;
  double mean_ = 0.0;
};

/// sup_x |F_emp(x) - cdf(x)|, evaluated on both sides of every step.
double ks_distance(const EmpiricalWelfare& emp,
                   const std::function<double(double)>& cdf);
/// Same statistic against SN(lambda), using the cumulative CDF evaluation.
double ks_distance(const EmpiricalWelfare& emp, SkewNormal sn);

enum class Dominance { kDominates, kDominated, kIncomparable };
std::string_view to_string(Dominance d);

struct DominanceResult {
  Dominance verdict = Dominance::kIncomparable;
  // Both one-sided checks passed: reported as incomparable.
  bool statistically_equal = false;
  double slack = 0.0;       // DKW two-sample band, plus sketch tolerance
  double excess_ab = 0.0;   // sup_x F_a(x) - F_b(x)
  double excess_ba = 0.0;   // sup_x F_b(x) - F_a(x)
};

/// First-order stochastic dominance of emp_a over emp_b with a two-sample DKW
/// band of level alpha: a dominates when F_a <= F_b + slack on the merged
/// support and the reverse inequality fails.
DominanceResult dominates(const EmpiricalWelfare& emp_a,
                          const EmpiricalWelfare& emp_b, double alpha = 0.01);

}  // namespace welfare_order
