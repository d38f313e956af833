#include "welfare_order/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "welfare_order/errors.hpp"
#include "welfare_order/quadrature.hpp"

namespace welfare_order {
namespace {

constexpr double kProbabilityTolerance = 1e-12;

std::string join(std::span<const double> xs) {
  std::ostringstream out;
  out.precision(17);
  out << '[';
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out << ',';
    out << xs[i];
  }
  out << ']';
  return out.str();
}

std::vector<double> cumulate(std::span<const double> probabilities) {
  std::vector<double> cumulative(probabilities.size());
  std::partial_sum(probabilities.begin(), probabilities.end(),
                   cumulative.begin());
  return cumulative;
}

std::size_t pick_index(std::span<const double> cumulative, double u) {
  // Total mass is 1 up to rounding; fall back to the last atom.
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(),
                                   u * cumulative.back());
  return std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
}

void check_probabilities(std::span<const double> probabilities,
                         const char* what) {
  double total = 0.0;
  for (double q : probabilities) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
      throw ConfigError(std::string(what) + ": probabilities must be >= 0");
    }
    total += q;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw ConfigError(std::string(what) + ": probabilities sum to " +
                      std::to_string(total) + ", expected 1");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// LimitDistribution

LimitDistribution::LimitDistribution(std::vector<double> support,
                                     std::vector<double> probabilities)
    : support_(std::move(support)), probabilities_(std::move(probabilities)) {
  if (support_.empty()) {
    throw ConfigError("limit distribution: support is empty");
  }
  if (support_.size() != probabilities_.size()) {
    throw ConfigError(
        "limit distribution: support and probabilities differ in length");
  }
  for (double s : support_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ConfigError("limit distribution: sizes must be positive, got " +
                        std::to_string(s));
    }
  }
  check_probabilities(probabilities_, "limit distribution");
  cumulative_ = cumulate(probabilities_);
}

double LimitDistribution::max_size() const noexcept {
  return *std::max_element(support_.begin(), support_.end());
}

double LimitDistribution::expect(
    const std::function<double(double)>& f) const {
  double total = 0.0;
  for (std::size_t j = 0; j < support_.size(); ++j) {
    total += probabilities_[j] * f(support_[j]);
  }
  return total;
}

double LimitDistribution::sample(CounterStream& stream) const {
  return support_[pick_index(cumulative_, stream.uniform())];
}

// ---------------------------------------------------------------------------
// Society

Society::Society(std::vector<double> sizes, std::optional<double> size_bound,
                 std::optional<LimitDistribution> limit)
    : sizes_(std::move(sizes)), limit_(std::move(limit)) {
  if (sizes_.empty()) throw ConfigError("society: no groups");
  for (double s : sizes_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ConfigError("society: group sizes must be positive, got " +
                        std::to_string(s));
    }
  }
  const double largest = *std::max_element(sizes_.begin(), sizes_.end());
  size_bound_ = size_bound.value_or(largest);
  if (!(size_bound_ > 0.0)) throw ConfigError("society: size bound must be > 0");
  if (largest > size_bound_) {
    throw ConfigError("society: size " + std::to_string(largest) +
                      " exceeds the declared bound " +
                      std::to_string(size_bound_));
  }
}

Society Society::draw_from(const LimitDistribution& limit, std::size_t n,
                           std::uint64_t seed) {
  if (n == 0) throw ConfigError("society: n must be >= 1");
  CounterStream stream(seed, 0);
  std::vector<double> sizes(n);
  for (double& s : sizes) s = limit.sample(stream);
  return Society(std::move(sizes), limit.max_size(), limit);
}

Society Society::repeat_pattern(std::span<const double> pattern,
                                std::size_t n) {
  if (pattern.empty()) throw ConfigError("society: empty size pattern");
  if (n == 0) throw ConfigError("society: n must be >= 1");
  std::vector<double> sizes(n);
  for (std::size_t i = 0; i < n; ++i) sizes[i] = pattern[i % pattern.size()];
  return Society(std::move(sizes));
}

// ---------------------------------------------------------------------------
// SizeLaw / WeightAllocation

SizeLaw SizeLaw::proportional() { return SizeLaw(Kind::kProportional, 1.0); }
SizeLaw SizeLaw::constant() { return SizeLaw(Kind::kConstant, 0.0); }

SizeLaw SizeLaw::power(double exponent) {
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw ConfigError("power law: exponent must be >= 0");
  }
  return SizeLaw(Kind::kPower, exponent);
}

SizeLaw SizeLaw::table(std::vector<double> breakpoints,
                       std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw ConfigError(
        "table law: need exactly one more value than breakpoints");
  }
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
      std::adjacent_find(breakpoints.begin(), breakpoints.end()) !=
          breakpoints.end()) {
    throw ConfigError("table law: breakpoints must be strictly increasing");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("table law: weights must be >= 0");
    }
  }
  SizeLaw law(Kind::kTable, 0.0);
  law.breakpoints_ = std::move(breakpoints);
  law.values_ = std::move(values);
  return law;
}

double SizeLaw::operator()(double size) const {
  switch (kind_) {
    case Kind::kProportional:
      return size;
    case Kind::kConstant:
      return 1.0;
    case Kind::kPower:
      return std::pow(size, exponent_);
    case Kind::kTable: {
      const auto it =
          std::upper_bound(breakpoints_.begin(), breakpoints_.end(), size);
      return values_[it - breakpoints_.begin()];
    }
  }
  return 0.0;
}

std::string SizeLaw::describe() const {
  switch (kind_) {
    case Kind::kProportional:
      return "proportional";
    case Kind::kConstant:
      return "constant";
    case Kind::kPower: {
      std::ostringstream out;
      out.precision(17);
      out << "power(" << exponent_ << ")";
      return out.str();
    }
    case Kind::kTable:
      return "table(breakpoints=" + join(breakpoints_) +
             ",values=" + join(values_) + ")";
  }
  return "?";
}

WeightAllocation WeightAllocation::explicit_weights(
    std::vector<double> weights, std::optional<double> weight_bound) {
  if (weights.empty()) throw ConfigError("allocation: no weights");
  double largest = 0.0;
  for (double a : weights) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ConfigError("allocation: weights must be finite and >= 0");
    }
    largest = std::max(largest, a);
  }
  if (largest == 0.0) throw ConfigError("allocation: all weights are zero");
  if (weight_bound && largest > *weight_bound) {
    throw ConfigError("allocation: weight " + std::to_string(largest) +
                      " exceeds the declared bound " +
                      std::to_string(*weight_bound));
  }
  WeightAllocation alloc;
  alloc.weights_ = std::move(weights);
  alloc.bound_ = weight_bound.value_or(largest);
  return alloc;
}

WeightAllocation WeightAllocation::from_law(
    SizeLaw law, std::optional<double> weight_bound) {
  if (weight_bound && !(*weight_bound > 0.0)) {
    throw ConfigError("allocation: weight bound must be > 0");
  }
  WeightAllocation alloc;
  alloc.law_ = std::move(law);
  alloc.bound_ = weight_bound;
  return alloc;
}

const SizeLaw& WeightAllocation::law() const {
  if (!law_) throw std::logic_error("allocation is explicit, not a law");
  return *law_;
}

std::span<const double> WeightAllocation::weights() const {
  if (law_) throw std::logic_error("allocation is a law; materialize first");
  return weights_;
}

double WeightAllocation::weight_for_size(double size) const {
  const double a = std::max(0.0, law()(size));
  return bound_ ? std::min(a, *bound_) : a;
}

std::string WeightAllocation::describe() const {
  return law_ ? "law:" + law_->describe() : "explicit:" + join(weights_);
}

std::vector<double> materialize_weights(const Society& society,
                                        const WeightAllocation& alloc) {
  std::vector<double> weights;
  if (alloc.is_law()) {
    weights.reserve(society.group_count());
    for (double s : society.sizes()) {
      weights.push_back(alloc.weight_for_size(s));
    }
  } else {
    const auto explicit_list = alloc.weights();
    if (explicit_list.size() != society.group_count()) {
      throw ConfigError("allocation: " + std::to_string(explicit_list.size()) +
                        " weights for " +
                        std::to_string(society.group_count()) + " groups");
    }
    weights.assign(explicit_list.begin(), explicit_list.end());
  }
  if (std::all_of(weights.begin(), weights.end(),
                  [](double a) { return a == 0.0; })) {
    throw ConfigError("allocation: every materialized weight is zero");
  }
  return weights;
}

// ---------------------------------------------------------------------------
// RepresentationRule

RepresentationRule RepresentationRule::winner_take_all() {
  return RepresentationRule(Kind::kWinnerTakeAll);
}

RepresentationRule RepresentationRule::proportional() {
  return RepresentationRule(Kind::kProportional);
}

RepresentationRule RepresentationRule::step(std::vector<double> breakpoints,
                                            std::vector<double> values) {
  RepresentationRule rule(Kind::kStep);
  rule.breakpoints_ = std::move(breakpoints);
  rule.values_ = std::move(values);
  return rule;
}

double RepresentationRule::step_value(double x) const noexcept {
  const double magnitude = std::abs(x);
  if (magnitude == 0.0 || breakpoints_.empty() ||
      breakpoints_.size() != values_.size()) {
    return 0.0;
  }
  const auto it =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), magnitude);
  if (it == breakpoints_.begin()) return 0.0;
  const double v = values_[(it - breakpoints_.begin()) - 1];
  return x < 0.0 ? -v : v;
}

std::vector<double> RepresentationRule::jump_points() const {
  switch (kind_) {
    case Kind::kWinnerTakeAll:
    case Kind::kProportional:
      return {};
    case Kind::kStep:
      break;
  }
  std::vector<double> jumps;
  for (double b : breakpoints_) {
    if (b > 0.0 && b <= 1.0) jumps.push_back(b);
  }
  return jumps;
}

std::string RepresentationRule::describe() const {
  switch (kind_) {
    case Kind::kWinnerTakeAll:
      return "winner-take-all";
    case Kind::kProportional:
      return "proportional";
    case Kind::kStep:
      break;
  }
  return "step(breakpoints=" + join(breakpoints_) +
         ",values=" + join(values_) + ")";
}

std::vector<RuleViolation> validate_rule(const RepresentationRule& rule) {
  using Code = RuleViolation::Code;
  std::vector<RuleViolation> violations;
  if (rule.kind() != RepresentationRule::Kind::kStep) return violations;

  const auto breakpoints = rule.breakpoints();
  const auto values = rule.values();
  if (breakpoints.empty() || breakpoints.size() != values.size()) {
    violations.push_back({Code::kMalformedTable,
                          "step rule needs one value per breakpoint"});
    return violations;
  }
  for (std::size_t j = 0; j < breakpoints.size(); ++j) {
    const double b = breakpoints[j];
    if (!(b >= 0.0 && b <= 1.0)) {
      violations.push_back({Code::kMalformedTable,
                            "breakpoint " + std::to_string(b) +
                                " outside [0, 1]"});
    }
    if (j > 0 && !(breakpoints[j] > breakpoints[j - 1])) {
      violations.push_back(
          {Code::kMalformedTable, "breakpoints must be strictly increasing"});
    }
  }
  // The table is mirrored through r(0) = 0, so oddness holds by construction;
  // monotonicity on [-1, 1] then needs 0 <= v_0 <= v_1 <= ... .
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double v = values[j];
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
      violations.push_back({Code::kOutOfRange, "value " + std::to_string(v) +
                                                   " outside [-1, 1]"});
    }
    if (v < 0.0) {
      violations.push_back(
          {Code::kDecreasing,
           "negative value " + std::to_string(v) +
               " makes r decrease across 0 once mirrored"});
    }
    if (j > 0 && values[j] < values[j - 1]) {
      violations.push_back({Code::kDecreasing,
                            "value " + std::to_string(values[j]) +
                                " at breakpoint " +
                                std::to_string(breakpoints[j]) +
                                " is below the previous value " +
                                std::to_string(values[j - 1])});
    }
  }
  const bool all_zero = std::all_of(values.begin(), values.end(),
                                    [](double v) { return v == 0.0; });
  const bool no_support =
      !breakpoints.empty() && breakpoints.front() > 1.0;
  if (all_zero || no_support) {
    violations.push_back({Code::kIdenticallyZero, "rule is identically zero"});
  }
  return violations;
}

double eval_rule(const RepresentationRule& rule, double x) {
  if (!(std::abs(x) <= 1.0)) {
    throw std::domain_error("representation rule evaluated outside [-1, 1]");
  }
  return rule(x);
}

// ---------------------------------------------------------------------------
// MarginDistribution

MarginDistribution MarginDistribution::rademacher() {
  MarginDistribution d(Kind::kRademacher);
  d.second_moment_ = 1.0;
  return d;
}

MarginDistribution MarginDistribution::uniform() {
  MarginDistribution d(Kind::kUniform);
  d.second_moment_ = 1.0 / 3.0;
  return d;
}

MarginDistribution MarginDistribution::symmetric_beta(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ConfigError("symmetric-beta: shape must be > 0");
  }
  MarginDistribution d(Kind::kSymmetricBeta);
  d.shape_ = shape;
  // Var(2B - 1) = 4 Var(B) = 4 / (4 (2 shape + 1)).
  d.second_moment_ = 1.0 / (2.0 * shape + 1.0);
  return d;
}

MarginDistribution MarginDistribution::discrete_symmetric(
    std::vector<double> points, std::vector<double> probabilities) {
  if (points.empty() || points.size() != probabilities.size()) {
    throw ConfigError(
        "discrete-symmetric: need one probability per support point");
  }
  for (double p : points) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("discrete-symmetric: points must lie in [0, 1]");
    }
  }
  {
    std::vector<double> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("discrete-symmetric: duplicate support point");
    }
  }
  check_probabilities(probabilities, "discrete-symmetric");
  MarginDistribution d(Kind::kDiscreteSymmetric);
  double second = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    second += probabilities[j] * points[j] * points[j];
  }
  if (!(second > 0.0)) {
    throw ConfigError(
        "discrete-symmetric: degenerate at 0 (no mass off the origin)");
  }
  d.second_moment_ = second;
  d.points_ = std::move(points);
  d.probabilities_ = std::move(probabilities);
  d.cumulative_ = cumulate(d.probabilities_);
  return d;
}

std::vector<Atom> MarginDistribution::support() const {
  switch (kind_) {
    case Kind::kRademacher:
      return {{-1.0, 0.5}, {1.0, 0.5}};
    case Kind::kDiscreteSymmetric:
      break;
    default:
      throw std::logic_error("continuous margin has no finite support");
  }
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < points_.size(); ++j) {
    if (probabilities_[j] == 0.0) continue;
    if (points_[j] == 0.0) {
      atoms.push_back({0.0, probabilities_[j]});
    } else {
      atoms.push_back({-points_[j], 0.5 * probabilities_[j]});
      atoms.push_back({points_[j], 0.5 * probabilities_[j]});
    }
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  return atoms;
}

double MarginDistribution::sample_beta(CounterStream& stream) const noexcept {
  const double g1 = stream.gamma(shape_);
  const double g2 = stream.gamma(shape_);
  return 2.0 * (g1 / (g1 + g2)) - 1.0;
}

double MarginDistribution::sample_discrete(
    CounterStream& stream) const noexcept {
  const double p = points_[pick_index(cumulative_, stream.uniform())];
  return stream.coin() > 0 ? p : -p;
}

double MarginDistribution::expect_even(const std::function<double(double)>& g,
                                       std::span<const double> split_points,
                                       double tol) const {
  switch (kind_) {
    case Kind::kRademacher:
      return g(1.0);
    case Kind::kDiscreteSymmetric: {
      double total = 0.0;
      for (std::size_t j = 0; j < points_.size(); ++j) {
        total += probabilities_[j] * g(points_[j]);
      }
      return total;
    }
    case Kind::kUniform:
      return quadrature(g, 0.0, 1.0, tol, split_points);
    case Kind::kSymmetricBeta:
      break;
  }
  // Density of X = 2B - 1 on [-1, 1]: (1 - x^2)^(a-1) / (2^(2a-1) B(a, a)).
  const double a = shape_;
  const double log_norm = (2.0 * a - 1.0) * std::log(2.0) +
                          2.0 * std::lgamma(a) - std::lgamma(2.0 * a);
  if (a >= 1.0) {
    auto integrand = [&](double x) {
      return 2.0 * g(x) *
             std::exp((a - 1.0) * std::log1p(-x * x) - log_norm);
    };
    return quadrature(integrand, 0.0, 1.0, tol, split_points);
  }
  // Shape < 1 has an integrable singularity at x = 1. Substituting
  // u = (1 - x)^a flattens it: f(x) dx = (2 - u^(1/a))^(a-1) du / (a C).
  auto integrand = [&](double u) {
    const double w = std::pow(u, 1.0 / a);
    return 2.0 * g(1.0 - w) *
           std::exp((a - 1.0) * std::log(2.0 - w) - log_norm) / a;
  };
  std::vector<double> mapped;
  for (double b : split_points) mapped.push_back(std::pow(1.0 - b, a));
  return quadrature(integrand, 0.0, 1.0, tol, mapped);
}

std::string MarginDistribution::describe() const {
  switch (kind_) {
    case Kind::kRademacher:
      return "rademacher";
    case Kind::kUniform:
      return "uniform";
    case Kind::kSymmetricBeta: {
      std::ostringstream out;
      out.precision(17);
      out << "symmetric-beta(" << shape_ << ")";
      return out.str();
    }
    case Kind::kDiscreteSymmetric:
      break;
  }
  return "discrete-symmetric(points=" + join(points_) +
         ",probabilities=" + join(probabilities_) + ")";
}

double sample_margin(const MarginDistribution& dist, CounterStream& stream) {
  return dist.sample(stream);
}

}  // namespace welfare_order
