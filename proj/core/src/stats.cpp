#include "welfare_order/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "welfare_order/errors.hpp"

namespace welfare_order {
namespace {

// 2 Phi(-40) is far below double resolution next to 1.
constexpr double kTail = 40.0;
constexpr double kCdfTolerance = 1e-11;
constexpr double kPieceTolerance = 1e-14;

std::vector<double> sn_breakpoints(double lambda) {
  std::vector<double> points{-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0};
  const double scale = std::abs(lambda);
  if (scale > 0.0) {
    // Phi(lambda y) switches over a window of width ~1/|lambda| around 0.
    for (double k : {0.25, 1.0, 4.0, 8.0}) {
      if (k / scale < kTail) {
        points.push_back(-k / scale);
        points.push_back(k / scale);
      }
    }
  }
  return points;
}

double half_normal_cdf(double lambda, double x) {
  if (lambda > 0.0) return x <= 0.0 ? 0.0 : 2.0 * normal_cdf(x) - 1.0;
  return x >= 0.0 ? 1.0 : 2.0 * normal_cdf(x);
}

std::size_t count_below(std::span<const double> sorted, double x) {
  return std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
}

std::size_t count_at_or_below(std::span<const double> sorted, double x) {
  return std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
}

}  // namespace

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi *
                                   std::numbers::sqrt2);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double sn_pdf(SkewNormal sn, double x) {
  if (std::isinf(sn.lambda)) {
    const bool inside = sn.lambda > 0.0 ? x >= 0.0 : x <= 0.0;
    return inside ? 2.0 * normal_pdf(x) : 0.0;
  }
  return 2.0 * normal_pdf(x) * normal_cdf(sn.lambda * x);
}

double sn_cdf(SkewNormal sn, double x) {
  if (std::isinf(sn.lambda)) return half_normal_cdf(sn.lambda, x);
  if (x <= -kTail) return 0.0;
  if (x >= kTail) return 1.0;
  const auto pdf = [lambda = sn.lambda](double y) {
    return sn_pdf(SkewNormal{lambda}, y);
  };
  const auto cuts = sn_breakpoints(sn.lambda);
  double h;
  if (x <= 0.0) {
    h = quadrature(pdf, -kTail, x, kCdfTolerance, cuts);
  } else {
    h = 1.0 - quadrature(pdf, x, kTail, kCdfTolerance, cuts);
  }
  return std::clamp(h, 0.0, 1.0);
}

std::vector<double> sn_cdf_sorted(SkewNormal sn, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  if (xs.empty()) return out;
  if (!std::is_sorted(xs.begin(), xs.end())) {
    throw std::invalid_argument("sn_cdf_sorted: points must be ascending");
  }
  if (std::isinf(sn.lambda)) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      out[k] = half_normal_cdf(sn.lambda, xs[k]);
    }
    return out;
  }
  const auto pdf = [lambda = sn.lambda](double y) {
    return sn_pdf(SkewNormal{lambda}, y);
  };
  const auto cuts = sn_breakpoints(sn.lambda);
  double h = sn_cdf(sn, xs[0]);
  out[0] = h;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double a = std::clamp(xs[k - 1], -kTail, kTail);
    const double b = std::clamp(xs[k], -kTail, kTail);
    if (b > a) h += quadrature(pdf, a, b, kPieceTolerance, cuts);
    out[k] = std::clamp(h, 0.0, 1.0);
  }
  return out;
}

double sn_mean(SkewNormal sn) {
  const double scale = std::sqrt(2.0 / std::numbers::pi);
  if (std::isinf(sn.lambda)) return sn.lambda > 0.0 ? scale : -scale;
  return scale * sn.lambda / std::sqrt(1.0 + sn.lambda * sn.lambda);
}

MonotoneCheckReport sn_cdf_monotone_check(std::span<const double> lambda_grid,
                                          std::span<const double> x_grid,
                                          double tol) {
  MonotoneCheckReport report;
  std::vector<double> lambdas(lambda_grid.begin(), lambda_grid.end());
  std::sort(lambdas.begin(), lambdas.end());
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    double previous = 0.0;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      const double h = sn_cdf(SkewNormal{lambdas[k]}, x_grid[j]);
      if (k > 0 && !(h - previous < tol)) {
        report.pass = false;
        report.failures.emplace_back(k, j);
      }
      previous = h;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// CdfSketch

CdfSketch::CdfSketch(double lo, double hi, std::size_t bins)
    : lo_(lo), hi_(hi), counts_(bins, 0) {
  if (!(hi > lo) || bins == 0) {
    throw std::invalid_argument("CdfSketch: need lo < hi and bins > 0");
  }
}

void CdfSketch::add(double x) noexcept {
  ++total_;
  below_edge_valid_ = false;
  if (x < lo_) {
    ++underflow_;
  } else if (x >= hi_) {
    ++overflow_;
  } else {
    auto k = static_cast<std::size_t>((x - lo_) / (hi_ - lo_) *
                                      static_cast<double>(counts_.size()));
    ++counts_[std::min(k, counts_.size() - 1)];
  }
}

void CdfSketch::merge(const CdfSketch& other) {
  if (other.lo_ != lo_ || other.hi_ != hi_ ||
      other.counts_.size() != counts_.size()) {
    throw std::invalid_argument("CdfSketch: merging incompatible sketches");
  }
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  underflow_ += other.underflow_;
  overflow_ += other.overflow_;
  total_ += other.total_;
  below_edge_valid_ = false;
}

void CdfSketch::rebuild() const {
  below_edge_.assign(counts_.size() + 1, 0);
  below_edge_[0] = underflow_;
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    below_edge_[k + 1] = below_edge_[k] + counts_[k];
  }
  below_edge_valid_ = true;
}

double CdfSketch::cdf_at_edge(std::size_t k) const {
  if (total_ == 0) return 0.0;
  if (!below_edge_valid_) rebuild();
  return static_cast<double>(below_edge_[k]) / static_cast<double>(total_);
}

double CdfSketch::cdf(double x) const {
  if (total_ == 0) return 0.0;
  // Mass outside [lo, hi) is only known in total.
  if (x < lo_) return cdf_at_edge(0);
  if (x >= hi_) return overflow_ == 0 ? 1.0 : cdf_at_edge(counts_.size());
  const double pos =
      (x - lo_) / (hi_ - lo_) * static_cast<double>(counts_.size());
  const auto k = std::min(static_cast<std::size_t>(pos), counts_.size() - 1);
  const double frac = pos - static_cast<double>(k);
  return cdf_at_edge(k) + frac * (cdf_at_edge(k + 1) - cdf_at_edge(k));
}

// ---------------------------------------------------------------------------
// EmpiricalWelfare

EmpiricalWelfare EmpiricalWelfare::from_samples(std::vector<double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("EmpiricalWelfare: need at least one sample");
  }
  std::sort(samples.begin(), samples.end());
  EmpiricalWelfare emp;
  double total = 0.0;
  for (double w : samples) total += w;
  emp.mean_ = total / static_cast<double>(samples.size());
  emp.samples_ = std::move(samples);
  return emp;
}

EmpiricalWelfare EmpiricalWelfare::from_sketch(CdfSketch sketch, double mean) {
  if (sketch.count() == 0) {
    throw std::invalid_argument("EmpiricalWelfare: empty sketch");
  }
  EmpiricalWelfare emp;
  emp.sketch_ = std::move(sketch);
  emp.mean_ = mean;
  return emp;
}

std::uint64_t EmpiricalWelfare::count() const noexcept {
  return sketch_ ? sketch_->count() : samples_.size();
}

const CdfSketch& EmpiricalWelfare::sketch() const {
  if (!sketch_) throw std::logic_error("EmpiricalWelfare holds raw samples");
  return *sketch_;
}

double EmpiricalWelfare::cdf(double x) const {
  if (sketch_) return sketch_->cdf(x);
  return static_cast<double>(count_at_or_below(samples_, x)) /
         static_cast<double>(samples_.size());
}

double EmpiricalWelfare::cdf_left(double x) const {
  if (sketch_) return sketch_->cdf(x);
  return static_cast<double>(count_below(samples_, x)) /
         static_cast<double>(samples_.size());
}

std::vector<double> EmpiricalWelfare::evaluation_points() const {
  if (!sketch_) return samples_;
  std::vector<double> edges(sketch_->bins() + 1);
  for (std::size_t k = 0; k <= sketch_->bins(); ++k) edges[k] = sketch_->edge(k);
  return edges;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov distance

namespace {

// Distinct evaluation points with their model CDF values already computed.
double ks_from_values(const EmpiricalWelfare& emp,
                      std::span<const double> points,
                      std::span<const double> model_cdf) {
  double distance = 0.0;
  if (emp.is_sketch()) {
    const CdfSketch& sketch = emp.sketch();
    for (std::size_t k = 0; k < points.size(); ++k) {
      distance =
          std::max(distance, std::abs(sketch.cdf_at_edge(k) - model_cdf[k]));
    }
    return distance;
  }
  const auto samples = emp.samples();
  const double m = static_cast<double>(samples.size());
  std::size_t i = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    // points are the distinct sample values in order
    const std::size_t below = i;
    while (i < samples.size() && samples[i] == points[k]) ++i;
    const double left = static_cast<double>(below) / m;
    const double right = static_cast<double>(i) / m;
    distance = std::max(distance, std::abs(right - model_cdf[k]));
    distance = std::max(distance, std::abs(model_cdf[k] - left));
  }
  return distance;
}

std::vector<double> distinct_points(const EmpiricalWelfare& emp) {
  std::vector<double> points = emp.evaluation_points();
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace

double ks_distance(const EmpiricalWelfare& emp,
                   const std::function<double(double)>& cdf) {
  const auto points = distinct_points(emp);
  std::vector<double> values(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) values[k] = cdf(points[k]);
  return ks_from_values(emp, points, values);
}

double ks_distance(const EmpiricalWelfare& emp, SkewNormal sn) {
  const auto points = distinct_points(emp);
  const auto values = sn_cdf_sorted(sn, points);
  return ks_from_values(emp, points, values);
}

// ---------------------------------------------------------------------------
// Stochastic dominance

std::string_view to_string(Dominance d) {
  switch (d) {
    case Dominance::kDominates:
      return "dominates";
    case Dominance::kDominated:
      return "dominated";
    case Dominance::kIncomparable:
      return "incomparable";
  }
  return "?";
}

DominanceResult dominates(const EmpiricalWelfare& emp_a,
                          const EmpiricalWelfare& emp_b, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("dominates: alpha must lie in (0, 1)");
  }
  DominanceResult result;
  const double log_term = std::log(2.0 / alpha);
  result.slack =
      std::sqrt(log_term / (2.0 * static_cast<double>(emp_a.count()))) +
      std::sqrt(log_term / (2.0 * static_cast<double>(emp_b.count()))) +
      emp_a.extra_tolerance() + emp_b.extra_tolerance();

  std::vector<double> points = emp_a.evaluation_points();
  const auto other = emp_b.evaluation_points();
  points.insert(points.end(), other.begin(), other.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  for (double x : points) {
    const double fa = emp_a.cdf(x);
    const double fb = emp_b.cdf(x);
    result.excess_ab = std::max(result.excess_ab, fa - fb);
    result.excess_ba = std::max(result.excess_ba, fb - fa);
  }

  const bool a_over_b = result.excess_ab <= result.slack;
  const bool b_over_a = result.excess_ba <= result.slack;
  if (a_over_b && !b_over_a) {
    result.verdict = Dominance::kDominates;
  } else if (b_over_a && !a_over_b) {
    result.verdict = Dominance::kDominated;
  } else {
    result.verdict = Dominance::kIncomparable;
    result.statistically_equal = a_over_b && b_over_a;
  }
  return result;
}

}  // namespace welfare_order
