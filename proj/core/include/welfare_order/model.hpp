#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "welfare_order/rng.hpp"

namespace welfare_order {

/// Finite discrete limit distribution of group sizes (point masses on a
/// finite support of positive sizes).
class LimitDistribution {
 public:
  LimitDistribution(std::vector<double> support,
                    std::vector<double> probabilities);

  std::span<const double> support() const noexcept { return support_; }
  std::span<const double> probabilities() const noexcept {
    return probabilities_;
  }
  double max_size() const noexcept;

  // Sum of probability * f(size) over the support.
  double expect(const std::function<double(double)>& f) const;

  // One size drawn by inversion of the cumulative probabilities.
  double sample(CounterStream& stream) const;

 private:
  std::vector<double> support_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

/// Group sizes of one society, bounded by a declared size bound (defaults to
/// the largest size), optionally paired with a limiting size distribution.
class Society {
 public:
  explicit Society(std::vector<double> sizes,
                   std::optional<double> size_bound = std::nullopt,
                   std::optional<LimitDistribution> limit = std::nullopt);

  std::span<const double> sizes() const noexcept { return sizes_; }
  std::size_t group_count() const noexcept { return sizes_.size(); }
  double size_bound() const noexcept { return size_bound_; }
  const std::optional<LimitDistribution>& limit_dist() const noexcept {
    return limit_;
  }

  // n sizes drawn i.i.d. from the limit distribution.
  static Society draw_from(const LimitDistribution& limit, std::size_t n,
                           std::uint64_t seed);
  // The first n entries of the infinite repetition of pattern.
  static Society repeat_pattern(std::span<const double> pattern,
                                std::size_t n);

 private:
  std::vector<double> sizes_;
  double size_bound_;
  std::optional<LimitDistribution> limit_;
};

/// Size-to-weight law a(s).
class SizeLaw {
 public:
  enum class Kind { kProportional, kConstant, kPower, kTable };

  static SizeLaw proportional();
  static SizeLaw constant();
  static SizeLaw power(double exponent);
  // Piecewise constant: values[j] on [breakpoints[j-1], breakpoints[j]),
  // with values.size() == breakpoints.size() + 1.
  static SizeLaw table(std::vector<double> breakpoints,
                       std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  double exponent() const noexcept { return exponent_; }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }

  double operator()(double size) const;
  std::string describe() const;

 private:
  SizeLaw(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}

  Kind kind_;
  double exponent_ = 1.0;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Voting weights, either an explicit list aligned with a society's groups or
/// a size-to-weight law. Weights are bounded by weight_bound (ā); laws are
/// clipped to [0, ā] when a bound is declared.
class WeightAllocation {
 public:
  static WeightAllocation explicit_weights(
      std::vector<double> weights,
      std::optional<double> weight_bound = std::nullopt);
  static WeightAllocation from_law(
      SizeLaw law, std::optional<double> weight_bound = std::nullopt);

  bool is_law() const noexcept { return law_.has_value(); }
  const SizeLaw& law() const;
  std::span<const double> weights() const;
  std::optional<double> weight_bound() const noexcept { return bound_; }

  // a(s) clipped to [0, ā]. Only valid for laws.
  double weight_for_size(double size) const;

  std::string describe() const;

 private:
  WeightAllocation() = default;

  std::optional<SizeLaw> law_;
  std::vector<double> weights_;
  std::optional<double> bound_;
};

/// Explicit weight list for a society. Explicit allocations are returned
/// unchanged; throws ConfigError on a length mismatch or when every weight is
/// zero.
std::vector<double> materialize_weights(const Society& society,
                                        const WeightAllocation& alloc);

/// Odd nondecreasing map r: [-1, 1] -> [-1, 1] that splits a group's weight.
///
/// Step rules are right-continuous tables on [0, 1]: for x > 0,
/// r(x) = values[j] with j the last breakpoint <= x, and r(x) = 0 below the
/// first breakpoint. Negative arguments are mirrored, and r(0) = 0.
/// Construction does not validate; see validate_rule.
class RepresentationRule {
 public:
  enum class Kind { kWinnerTakeAll, kProportional, kStep };

  static RepresentationRule winner_take_all();
  static RepresentationRule proportional();
  static RepresentationRule step(std::vector<double> breakpoints,
                                 std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }

  // Unchecked evaluation; callers guarantee |x| <= 1 (the independent model
  // evaluates proportional and winner-take-all on the whole real line).
  double operator()(double x) const noexcept {
    switch (kind_) {
      case Kind::kWinnerTakeAll:
        return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      case Kind::kProportional:
        return x;
      case Kind::kStep:
        break;
    }
    return step_value(x);
  }

  // Points in (0, 1] where r jumps (mirror images are implied).
  std::vector<double> jump_points() const;
  std::string describe() const;

 private:
  explicit RepresentationRule(Kind kind) : kind_(kind) {}
  double step_value(double x) const noexcept;

  Kind kind_;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

struct RuleViolation {
  enum class Code {
    kNotOdd,
    kDecreasing,
    kOutOfRange,
    kIdenticallyZero,
    kMalformedTable,
  };
  Code code;
  std::string message;
};

// Empty result means the rule is valid. Never throws.
std::vector<RuleViolation> validate_rule(const RepresentationRule& rule);

// r(x); throws std::domain_error when |x| > 1.
double eval_rule(const RepresentationRule& rule, double x);

struct Atom {
  double value;
  double probability;
};

/// Symmetric nondegenerate law of a group vote margin on [-1, 1].
class MarginDistribution {
 public:
  enum class Kind { kRademacher, kUniform, kSymmetricBeta, kDiscreteSymmetric };

  static MarginDistribution rademacher();
  static MarginDistribution uniform();
  // X = 2B - 1 with B ~ Beta(shape, shape).
  static MarginDistribution symmetric_beta(double shape);
  // Each point p_j in [0, 1] carries probability q_j, split evenly between
  // +p_j and -p_j (an atom at 0 keeps its whole mass).
  static MarginDistribution discrete_symmetric(std::vector<double> points,
                                               std::vector<double> probabilities);

  Kind kind() const noexcept { return kind_; }
  double shape() const noexcept { return shape_; }
  bool is_discrete() const noexcept {
    return kind_ == Kind::kRademacher || kind_ == Kind::kDiscreteSymmetric;
  }
  // Half-support for discrete-symmetric laws, as declared.
  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> point_probabilities() const noexcept {
    return probabilities_;
  }

  double second_moment() const noexcept { return second_moment_; }

  // Full (mirrored) support in ascending order. Throws std::logic_error for
  // continuous laws.
  std::vector<Atom> support() const;

  double sample(CounterStream& stream) const noexcept {
    switch (kind_) {
      case Kind::kRademacher:
        return static_cast<double>(stream.coin());
      case Kind::kUniform:
        return stream.symmetric_unit();
      case Kind::kSymmetricBeta:
        return sample_beta(stream);
      case Kind::kDiscreteSymmetric:
        break;
    }
    return sample_discrete(stream);
  }

  // E[g(X)] for an even function g, computed from the half-line [0, 1]:
  // exact sums for discrete laws, adaptive quadrature (absolute tolerance
  // tol) split at the given points of (0, 1) otherwise.
  double expect_even(const std::function<double(double)>& g,
                     std::span<const double> split_points = {},
                     double tol = 1e-12) const;

  std::string describe() const;

 private:
  explicit MarginDistribution(Kind kind) : kind_(kind) {}
  double sample_beta(CounterStream& stream) const noexcept;
  double sample_discrete(CounterStream& stream) const noexcept;

  Kind kind_;
  double shape_ = 0.0;
  double second_moment_ = 0.0;
  std::vector<double> points_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

double sample_margin(const MarginDistribution& dist, CounterStream& stream);

}  // namespace welfare_order
